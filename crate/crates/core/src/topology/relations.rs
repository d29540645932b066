use crate::error::{Error, Result};
use crate::render::BinaryGrid;

/// Default tolerance for set relations: 0.1% of the reference set's cells.
pub const DEFAULT_TOLERANCE: f64 = 0.001;

/// Violating cells reported in full up to this many.
const SAMPLE_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    pub holds: bool,
    pub violation_count: usize,
    pub violation_fraction: f64,
    pub tolerance: f64,
    /// Flat indices of the first few violating cells.
    pub sample: Vec<usize>,
}

fn check_pair(a: &BinaryGrid, b: &BinaryGrid) -> Result<()> {
    if !a.same_shape(b) {
        return Err(Error::dimension(format!(
            "grids differ in shape: {:?} vs {:?}",
            a.dims(),
            b.dims()
        )));
    }
    Ok(())
}

fn check_tolerance(tolerance: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&tolerance) {
        return Err(Error::domain(format!(
            "tolerance {tolerance} is outside [0, 1]"
        )));
    }
    Ok(())
}

/// Checks `A ⊆ B`: violations are cells of `A` missing from `B`, measured as
/// a fraction of `A`'s occupied cells.
pub fn subset_relation(a: &BinaryGrid, b: &BinaryGrid, tolerance: f64) -> Result<RelationReport> {
    check_pair(a, b)?;
    check_tolerance(tolerance)?;
    let mut occupied = 0usize;
    let mut violation_count = 0usize;
    let mut sample = Vec::new();
    for (idx, (&x, &y)) in a.cells().iter().zip(b.cells()).enumerate() {
        if x {
            occupied += 1;
            if !y {
                violation_count += 1;
                if sample.len() < SAMPLE_LIMIT {
                    sample.push(idx);
                }
            }
        }
    }
    let violation_fraction = if occupied == 0 {
        0.0
    } else {
        violation_count as f64 / occupied as f64
    };
    Ok(RelationReport {
        holds: violation_fraction <= tolerance,
        violation_count,
        violation_fraction,
        tolerance,
        sample,
    })
}

/// Both inclusions. The fraction is the worse of the two directions and the
/// count is the size of the symmetric difference.
pub fn equality_relation(a: &BinaryGrid, b: &BinaryGrid, tolerance: f64) -> Result<RelationReport> {
    let ab = subset_relation(a, b, tolerance)?;
    let ba = subset_relation(b, a, tolerance)?;
    let mut sample = ab.sample;
    sample.extend(ba.sample);
    sample.sort_unstable();
    sample.truncate(SAMPLE_LIMIT);
    Ok(RelationReport {
        holds: ab.holds && ba.holds,
        violation_count: ab.violation_count + ba.violation_count,
        violation_fraction: ab.violation_fraction.max(ba.violation_fraction),
        tolerance,
        sample,
    })
}

/// Checks that each field is contained in its predecessor.
pub fn nesting_check(fields: &[BinaryGrid], tolerance: f64) -> Result<Vec<RelationReport>> {
    if fields.len() < 2 {
        return Err(Error::domain("nesting needs at least two fields"));
    }
    fields
        .windows(2)
        .map(|pair| subset_relation(&pair[1], &pair[0], tolerance))
        .collect()
}
