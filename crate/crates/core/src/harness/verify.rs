//! Reproduction checks for the model's propositions and observations.

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};

use super::config::{Check, JobSpec};
use crate::error::Result;
use crate::network::{build_model, ModelKind, NodeStatus, NodeValues, WeightMatrix};
use crate::oracle::{classify_point_exact, exact_from_f64, enclose_real_orbit, ratio, RationalComplex, RationalMatrix};
use crate::render::{
    extract_boundary, render_equi_m, render_multi_j_real, render_uni_j, BinaryGrid, Box3D, Field2D, Window2D,
};
use crate::topology::{
    box_counting_dim, default_scales, equality_relation, label_components, nesting_check, subset_relation,
};

/// Minimum share of `z2`'s cells outside `z3` for the self-drive inclusion to
/// count as strict.
pub const STRICT_MARGIN: f64 = 0.005;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckLine {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        CheckLine {
            name: name.to_string(),
            pass,
            detail,
        }
    }

    pub fn to_text(&self) -> String {
        format!("{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

struct Settings {
    n: usize,
    budget: u32,
    radius: f64,
    tolerance: f64,
    conn: crate::topology::Connectivity,
}

fn three_node(kind: ModelKind) -> Result<WeightMatrix> {
    build_model(&kind, 3)
}

fn equi_m(s: &Settings, kind: ModelKind) -> Result<Field2D> {
    render_equi_m(&three_node(kind)?, &Window2D::equi_m_default(s.n, s.n), s.budget, s.radius)
}

fn differing(a: &BinaryGrid, b: &BinaryGrid) -> usize {
    a.cells().iter().zip(b.cells()).filter(|(x, y)| x != y).count()
}

fn exact_equi(w: &RationalMatrix, c: (i64, i64), budget: u32, radius: f64) -> Result<Vec<NodeStatus>> {
    let c = vec![RationalComplex::real(ratio(c.0, c.1)); w.order()];
    Ok(classify_point_exact(w, &c, budget, radius)?.statuses)
}

pub fn run_check(check: Check, spec: &JobSpec) -> Result<Vec<CheckLine>> {
    let s = Settings {
        n: spec.resolution[0],
        budget: spec.iterations,
        radius: spec.radius,
        tolerance: spec.tolerance,
        conn: spec.connectivity,
    };
    match check {
        Check::Classical => classical(&s),
        Check::Prop1 => prop1(&s),
        Check::Prop2 => prop2(&s),
        Check::Prop3 => prop3(&s),
        Check::Nesting => nesting(&s),
        Check::Conjecture => conjecture(&s),
        Check::RealContrast => real_contrast(&s),
        Check::Dimension => dimension(&s),
    }
}

fn classical(s: &Settings) -> Result<Vec<CheckLine>> {
    let field = equi_m(s, ModelKind::SimpleDual { a: 0.0 })?;
    let layers: Vec<BinaryGrid> = (0..3).map(|k| field.node_layer(k)).collect();
    let d12 = differing(&layers[0], &layers[1]);
    let d13 = differing(&layers[0], &layers[2]);
    let single = render_equi_m(
        &WeightMatrix::identity(1)?,
        &Window2D::equi_m_default(s.n, s.n),
        s.budget,
        s.radius,
    )?;
    let d_single = differing(&field.intersection(), &single.intersection());
    Ok(vec![
        CheckLine::new(
            "node layers identical",
            d12 == 0 && d13 == 0,
            format!("{d12} pixels differ z1/z2, {d13} differ z1/z3"),
        ),
        CheckLine::new(
            "intersection equals single-map set",
            d_single == 0,
            format!("{d_single} pixels differ"),
        ),
    ])
}

fn prop1(s: &Settings) -> Result<Vec<CheckLine>> {
    let field = equi_m(s, ModelKind::SimpleDual { a: -2.0 / 3.0 })?;
    let (z1, z2, z3) = (field.node_layer(0), field.node_layer(1), field.node_layer(2));
    let eq = equality_relation(&z2, &z3, s.tolerance)?;
    let sub = subset_relation(&z2, &z1, s.tolerance)?;
    let w = RationalMatrix::three_node(ratio(-2, 3), ratio(0, 1), ratio(0, 1));
    let statuses = exact_equi(&w, (-2, 1), 40, s.radius)?;
    let expected = [NodeStatus::Bounded, NodeStatus::Escaped(4), NodeStatus::Escaped(2)];
    Ok(vec![
        CheckLine::new("z2 = z3", eq.holds, format!("violation_fraction {}", eq.violation_fraction)),
        CheckLine::new("z2 ⊆ z1", sub.holds, format!("violation_fraction {}", sub.violation_fraction)),
        CheckLine::new(
            "exact witness c = -2",
            statuses == expected,
            format!("statuses {statuses:?} over 40 steps"),
        ),
    ])
}

fn prop2(s: &Settings) -> Result<Vec<CheckLine>> {
    let field = equi_m(s, ModelKind::SelfDrive { a: -2.0 / 3.0, b: 1.0 / 3.0 })?;
    let (z2, z3) = (field.node_layer(1), field.node_layer(2));
    let sub = subset_relation(&z3, &z2, s.tolerance)?;
    let reverse = subset_relation(&z2, &z3, s.tolerance)?;

    let w = RationalMatrix::three_node(ratio(-2, 3), ratio(1, 3), ratio(0, 1));
    let c = vec![ratio(-3, 4); 3];
    let boxes = enclose_real_orbit(&w, &c, &[ratio(0, 1), ratio(0, 1), ratio(0, 1)], 100, 256)?;
    let z2_trapped = boxes.iter().all(|b| b[1].contained_in(&ratio(-1, 1), &ratio(0, 1)));
    let radius = exact_from_f64(s.radius)?;
    let z3_escape = boxes
        .iter()
        .position(|b| b[2].lo > radius || b[2].hi < -radius.clone());
    let z3_max = boxes
        .iter()
        .map(|b| b[2].lo.abs().max(b[2].hi.abs()))
        .max()
        .and_then(|x| x.to_f64())
        .unwrap_or(0.0);
    Ok(vec![
        CheckLine::new("z3 ⊆ z2", sub.holds, format!("violation_fraction {}", sub.violation_fraction)),
        CheckLine::new(
            "z2 ⊄ z3",
            reverse.violation_fraction >= STRICT_MARGIN,
            format!("share of z2 outside z3 {} (needs ≥ {STRICT_MARGIN})", reverse.violation_fraction),
        ),
        CheckLine::new(
            "c = -3/4: z2 orbit in [-1, 0]",
            z2_trapped,
            "rigorous enclosure over 100 steps".to_string(),
        ),
        CheckLine::new(
            "c = -3/4: z3 escapes",
            z3_escape.is_some(),
            match z3_escape {
                Some(t) => format!("enclosure leaves [-R, R] at step {t}"),
                None => format!("enclosure stays within |z3| ≤ {z3_max:.4} for 100 steps"),
            },
        ),
    ])
}

fn prop3(s: &Settings) -> Result<Vec<CheckLine>> {
    let field = equi_m(
        s,
        ModelKind::Feedback {
            a: -2.0 / 3.0,
            b: 1.0 / 3.0,
            f: -1.0,
        },
    )?;
    let eq = equality_relation(&field.node_layer(1), &field.node_layer(2), s.tolerance)?;
    Ok(vec![CheckLine::new(
        "z2 = z3",
        eq.holds,
        format!("violation_fraction {}", eq.violation_fraction),
    )])
}

pub const NESTING_COUPLINGS: [f64; 3] = [0.0, 1.0 / 3.0, 2.0 / 3.0];

fn nesting(s: &Settings) -> Result<Vec<CheckLine>> {
    let fields = NESTING_COUPLINGS
        .iter()
        .map(|&a| Ok(equi_m(s, ModelKind::SimpleDual { a })?.intersection()))
        .collect::<Result<Vec<_>>>()?;
    let reports = nesting_check(&fields, s.tolerance)?;
    Ok(reports
        .iter()
        .zip(["a = 1/3 ⊆ a = 0", "a = 2/3 ⊆ a = 1/3"])
        .map(|(r, name)| CheckLine::new(name, r.holds, format!("violation_fraction {}", r.violation_fraction)))
        .collect())
}

fn conjecture(s: &Settings) -> Result<Vec<CheckLine>> {
    let w = three_node(ModelKind::SelfDrive { a: -2.0 / 3.0, b: -1.0 / 3.0 })?;
    let window = Window2D::uni_j_default(s.n, s.n);
    let count = |c: f64| -> Result<usize> {
        let field = render_uni_j(&w, &NodeValues::equi_complex(3, Complex64::new(c, 0.0)), &window, s.budget, s.radius)?;
        Ok(label_components(&field.intersection(), s.conn)?.component_count)
    };
    let (inside, outside) = (count(-1.0)?, count(-0.63)?);
    Ok(vec![
        CheckLine::new("c = -1 connected", inside == 1, format!("{inside} components")),
        CheckLine::new("c = -0.63 disconnected", outside > 1, format!("{outside} components")),
    ])
}

pub const REAL_CONTRAST_POINTS: [[f64; 3]; 2] = [[-0.5, -0.7, -0.6], [-0.5, -0.7, -0.7]];

fn real_contrast(s: &Settings) -> Result<Vec<CheckLine>> {
    let w = three_node(ModelKind::SelfDrive { a: 0.5, b: 1.0 })?;
    let bbox = Box3D::default_real(s.n);
    let mut counts = Vec::new();
    for c in REAL_CONTRAST_POINTS {
        let field = render_multi_j_real(&w, &NodeValues::Real(c.to_vec()), &bbox, s.budget, s.radius)?;
        counts.push(label_components(&field.occupancy(), s.conn)?.component_count);
    }
    Ok(vec![
        CheckLine::new("c = (-0.5,-0.7,-0.6) connected", counts[0] == 1, format!("{} components", counts[0])),
        CheckLine::new("c = (-0.5,-0.7,-0.7) disconnected", counts[1] > 1, format!("{} components", counts[1])),
    ])
}

fn dimension(s: &Settings) -> Result<Vec<CheckLine>> {
    let mut slopes = Vec::new();
    for a in NESTING_COUPLINGS {
        let boundary = extract_boundary(&equi_m(s, ModelKind::SimpleDual { a })?.intersection());
        slopes.push(box_counting_dim(&boundary, &default_scales(&boundary))?.slope);
    }
    let trend = slopes.windows(2).all(|p| p[1] >= p[0]);
    Ok(vec![CheckLine::new(
        "boundary dimension non-decreasing in a",
        trend,
        format!("slopes {:.4}, {:.4}, {:.4} for a = 0, 1/3, 2/3", slopes[0], slopes[1], slopes[2]),
    )])
}
