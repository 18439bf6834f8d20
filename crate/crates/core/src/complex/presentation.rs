use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Word in the generators: +l is gamma_l, -l its inverse (1-based).
pub type Word = Vec<i32>;

/// Inverse word: reversed with every letter inverted.
pub fn inverse_word(w: &[i32]) -> Word {
    w.iter().rev().map(|l| -l).collect()
}

/// Finitely presented group: generator count and relation words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub generators: usize,
    pub relations: Vec<Word>,
}

impl GroupPresentation {
    pub fn new(generators: usize, relations: Vec<Word>) -> Result<Self> {
        if generators == 0 {
            return Err(Error::InvalidInput("a presentation needs at least one generator".into()));
        }
        let p = GroupPresentation {
            generators,
            relations,
        };
        for r in &p.relations {
            if r.is_empty() {
                return Err(Error::BadWord("empty relation".into()));
            }
            p.check_word(r)?;
        }
        Ok(p)
    }

    /// Free group on k generators (no relations, d1 = 0).
    pub fn free(k: usize) -> Self {
        GroupPresentation {
            generators: k,
            relations: Vec::new(),
        }
    }

    /// Cyclic group of order n: single relation gamma^n.
    pub fn cyclic(n: usize) -> Self {
        GroupPresentation {
            generators: 1,
            relations: vec![vec![1; n]],
        }
    }

    /// Free abelian group on k generators: all commutators gamma_i gamma_l gamma_i^-1 gamma_l^-1, i < l.
    pub fn abelian(k: usize) -> Self {
        let mut relations = Vec::new();
        for i in 1..=k as i32 {
            for l in (i + 1)..=k as i32 {
                relations.push(vec![i, l, -i, -l]);
            }
        }
        GroupPresentation {
            generators: k,
            relations,
        }
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn check_word(&self, w: &[i32]) -> Result<()> {
        for &l in w {
            if l == 0 || l.unsigned_abs() as usize > self.generators {
                return Err(Error::BadWord(format!(
                    "letter {l} out of range for {} generators",
                    self.generators
                )));
            }
        }
        Ok(())
    }
}
