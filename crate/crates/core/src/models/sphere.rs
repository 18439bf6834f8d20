use crate::complex::{diophantine_scan, Angle, DiophantineReport, Flavor, GroupPresentation, MultiplierAction};
use crate::error::Result;

/// Commuting z-rotations of the sphere on the bands J <= j_max, with the d0 scan over all bands.
/// The m = 0 modes are fixed by every rotation, so each band carries d0-kernel; the scan
/// certifies the nonzero part.
pub fn sphere_z_action(j_max: u32, angles: Vec<Angle>) -> Result<(MultiplierAction, DiophantineReport)> {
    let k = angles.len();
    let action = MultiplierAction::sphere_z_rotation(j_max.max(1), angles)?;
    let pres = GroupPresentation::abelian(k);
    let max_sq = j_max.max(1) as u64 * (j_max.max(1) as u64 + 1);
    let report = diophantine_scan(&action, &pres, Flavor::D0, max_sq)?;
    Ok((action, report))
}
