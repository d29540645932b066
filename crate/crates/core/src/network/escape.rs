use num_complex::Complex64;

use super::{check_shapes, step_into, NodeValues, Scalar, StateVector, WeightMatrix};
use crate::error::{Error, Result};

/// Orbits are truncated once any coordinate grows past this magnitude; one
/// more squaring still fits in an `f64`.
pub const MAGNITUDE_CAP: f64 = 1e75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeStatus {
    /// Never exceeded the radius during the full budget.
    Bounded,
    /// First iterate with magnitude above the radius.
    Escaped(u32),
    /// Never exceeded the radius, but the orbit was cut short by the cap.
    Undecided,
}

impl NodeStatus {
    /// Membership as rendered: undecided counts as bounded.
    #[inline]
    pub fn in_set(self) -> bool {
        !matches!(self, NodeStatus::Escaped(_))
    }

    #[inline]
    pub fn escape_iteration(self) -> Option<u32> {
        match self {
            NodeStatus::Escaped(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EscapeRecord {
    pub statuses: Vec<NodeStatus>,
    pub stop_iteration: u32,
    pub budget: u32,
    pub radius: f64,
}

impl EscapeRecord {
    pub fn all_in_set(&self) -> bool {
        self.statuses.iter().all(|s| s.in_set())
    }

    /// Earliest escape over all nodes.
    pub fn first_escape(&self) -> Option<u32> {
        self.statuses.iter().filter_map(|s| s.escape_iteration()).min()
    }
}

/// Reusable buffers for classifying many orbits of one network.
#[derive(Debug, Clone)]
pub struct EscapeScanner<T> {
    current: Vec<T>,
    next: Vec<T>,
}

impl<T: Scalar> EscapeScanner<T> {
    pub fn new(n: usize) -> Self {
        EscapeScanner {
            current: vec![T::ZERO; n],
            next: vec![T::ZERO; n],
        }
    }

    /// Classifies the orbit of `z0`, writing one status per node. Returns the
    /// stop iteration. Callers guarantee matching lengths, `budget >= 1` and a
    /// positive radius.
    pub fn scan(
        &mut self,
        w: &WeightMatrix,
        c: &[T],
        z0: &[T],
        budget: u32,
        radius: f64,
        statuses: &mut [NodeStatus],
    ) -> u32 {
        let n = w.order();
        debug_assert!(c.len() == n && z0.len() == n && statuses.len() == n);
        let radius_sq = radius * radius;
        let cap_sq = MAGNITUDE_CAP * MAGNITUDE_CAP;

        // `Undecided` doubles as "still pending" until the orbit stops.
        statuses.fill(NodeStatus::Undecided);
        self.current.copy_from_slice(z0);
        let mut pending = n;

        let mut stop = budget;
        let mut t = 0u32;
        loop {
            let mut capped = false;
            for k in 0..n {
                let m = self.current[k].norm_sqr();
                if !(m <= cap_sq) {
                    capped = true;
                }
                if statuses[k] == NodeStatus::Undecided && !(m <= radius_sq) {
                    statuses[k] = NodeStatus::Escaped(t);
                    pending -= 1;
                }
            }
            if pending == 0 || capped {
                stop = t;
                break;
            }
            if t == budget {
                break;
            }
            step_into(w, c, &self.current, &mut self.next);
            std::mem::swap(&mut self.current, &mut self.next);
            t += 1;
        }

        if stop == budget {
            for s in statuses.iter_mut() {
                if *s == NodeStatus::Undecided {
                    *s = NodeStatus::Bounded;
                }
            }
        }
        stop
    }
}

pub(crate) fn check_budget(budget: u32, radius: f64) -> Result<()> {
    if budget == 0 {
        return Err(Error::domain("iteration budget must be at least 1"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::domain(format!(
            "escape radius must be positive and finite, got {radius}"
        )));
    }
    Ok(())
}

/// Iterates from `z0` for at most `budget` steps, recording when each node
/// first leaves the disc of the given radius.
pub fn iterate_escape(
    w: &WeightMatrix,
    c: &NodeValues,
    z0: &StateVector,
    budget: u32,
    radius: f64,
) -> Result<EscapeRecord> {
    check_budget(budget, radius)?;
    check_shapes(w, c, &z0.values)?;
    let n = w.order();
    let mut statuses = vec![NodeStatus::Undecided; n];
    let stop_iteration = match (c, &z0.values) {
        (NodeValues::Complex(c), NodeValues::Complex(z)) => {
            EscapeScanner::<Complex64>::new(n).scan(w, c, z, budget, radius, &mut statuses)
        }
        (NodeValues::Real(c), NodeValues::Real(z)) => {
            EscapeScanner::<f64>::new(n).scan(w, c, z, budget, radius, &mut statuses)
        }
        _ => unreachable!("modes checked above"),
    };
    Ok(EscapeRecord {
        statuses,
        stop_iteration,
        budget,
        radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_model, ModelKind, Mode};
    use NodeStatus::*;

    fn critical(model: ModelKind, c: f64, budget: u32) -> EscapeRecord {
        let w = build_model(&model, 3).unwrap();
        iterate_escape(
            &w,
            &NodeValues::equi_real(3, c),
            &StateVector::origin(Mode::Real, 3),
            budget,
            10.0,
        )
        .unwrap()
    }

    #[test]
    fn zero_parameter_stays_bounded() {
        for model in [
            ModelKind::SimpleDual { a: 0.7 },
            ModelKind::SelfDrive { a: -0.3, b: 2.0 },
            ModelKind::Feedback { a: 1.0, b: -1.0, f: 3.0 },
        ] {
            let w = build_model(&model, 3).unwrap();
            let rec = iterate_escape(
                &w,
                &NodeValues::zeros(Mode::Complex, 3),
                &StateVector::origin(Mode::Complex, 3),
                100,
                10.0,
            )
            .unwrap();
            assert_eq!(rec.statuses, vec![Bounded; 3]);
            assert_eq!(rec.stop_iteration, 100);
        }
    }

    #[test]
    fn simple_dual_witness_at_minus_two() {
        let rec = critical(ModelKind::SimpleDual { a: -2.0 / 3.0 }, -2.0, 8);
        assert_eq!(rec.statuses, vec![Bounded, Escaped(4), Escaped(2)]);
        assert_eq!(rec.stop_iteration, 8);
    }

    #[test]
    fn truncated_orbit_leaves_survivors_undecided() {
        // z2 blows past the cap around step 10, long before the budget runs out.
        let rec = critical(ModelKind::SimpleDual { a: -2.0 / 3.0 }, -2.0, 100);
        assert_eq!(rec.statuses, vec![Undecided, Escaped(4), Escaped(2)]);
        assert!(rec.stop_iteration < 100);
        assert!(!rec.all_in_set());
        assert_eq!(rec.first_escape(), Some(2));
    }

    #[test]
    fn seed_outside_radius_escapes_at_zero() {
        let w = build_model(&ModelKind::SelfDrive { a: 0.0, b: -1.0 }, 3).unwrap();
        let rec = iterate_escape(
            &w,
            &NodeValues::equi_complex(3, Complex64::new(-1.0, 0.0)),
            &StateVector::new(NodeValues::equi_complex(3, Complex64::new(8.0, 8.0))),
            100,
            10.0,
        )
        .unwrap();
        assert_eq!(rec.statuses, vec![Escaped(0); 3]);
        assert_eq!(rec.stop_iteration, 0);
    }

    #[test]
    fn validates_budget_and_radius() {
        let w = WeightMatrix::identity(1).unwrap();
        let c = NodeValues::equi_real(1, 0.0);
        let z = StateVector::origin(Mode::Real, 1);
        assert!(matches!(iterate_escape(&w, &c, &z, 0, 10.0), Err(Error::Domain(_))));
        assert!(matches!(iterate_escape(&w, &c, &z, 10, 0.0), Err(Error::Domain(_))));
        assert!(matches!(iterate_escape(&w, &c, &z, 10, -1.0), Err(Error::Domain(_))));
        assert!(matches!(
            iterate_escape(&w, &c, &z, 10, f64::NAN),
            Err(Error::Domain(_))
        ));
    }
}
