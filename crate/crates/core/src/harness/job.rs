use std::fmt::Write as _;

use super::config::{expand_sweep, format_complex, format_real, JobKind, JobSpec};
use super::output::{encode_field_image, encode_voxels, metrics_csv, write_artifacts, Layer, Manifest, MetricsRow};
use super::verify::{run_check, CheckLine};
use crate::error::{Error, Result};
use crate::network::NodeValues;
use crate::render::{
    extract_boundary, render_equi_m, render_multi_j_real, render_multi_m_real, render_uni_j, BinaryGrid, Field2D,
    Field3D, SetKind,
};
use crate::topology::{box_counting_dim, default_scales, label_components, ComponentLabeling};

pub const METRICS_FILE: &str = "metrics.csv";

#[derive(Debug, Clone, PartialEq)]
pub enum Rendered {
    Planar(Field2D),
    Solid(Field3D),
}

impl Rendered {
    /// The network set: the node intersection for planar fields.
    pub fn occupancy(&self) -> BinaryGrid {
        match self {
            Rendered::Planar(field) => field.intersection(),
            Rendered::Solid(field) => field.occupancy(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobReport {
    pub manifest: Manifest,
    pub metrics: Vec<MetricsRow>,
    pub checks: Vec<CheckLine>,
}

impl JobReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Renders the set described by a render, sweep-point or analyze job.
pub fn render_job(spec: &JobSpec) -> Result<Rendered> {
    let kind = spec
        .set_kind()
        .ok_or_else(|| Error::domain(format!("job {} renders nothing", spec.id)))?;
    let model = spec
        .model
        .as_ref()
        .ok_or_else(|| Error::domain(format!("job {} has no model", spec.id)))?;
    let w = model.build(spec.seed)?;
    let (budget, radius) = (spec.iterations, spec.radius);
    Ok(match kind {
        SetKind::EquiM => Rendered::Planar(render_equi_m(&w, &spec.window2d()?, budget, radius)?),
        SetKind::UniJ => {
            let c = NodeValues::Complex(spec.parameter_values(w.order())?);
            Rendered::Planar(render_uni_j(&w, &c, &spec.window2d()?, budget, radius)?)
        }
        SetKind::MultiMReal => Rendered::Solid(render_multi_m_real(&w, &spec.box3d()?, budget, radius)?),
        SetKind::MultiJReal => {
            let c = NodeValues::Real(spec.parameter_values(w.order())?.iter().map(|z| z.re).collect());
            Rendered::Solid(render_multi_j_real(&w, &c, &spec.box3d()?, budget, radius)?)
        }
    })
}

/// Component count, occupied cells and boundary box-counting dimension of a
/// rendered set. The dimension is left empty when the boundary is empty or
/// the grid admits fewer than three scales.
pub fn measure(spec: &JobSpec, rendered: &Rendered) -> Result<(MetricsRow, ComponentLabeling)> {
    let occupied = rendered.occupancy();
    let labels = label_components(&occupied, spec.connectivity)?;
    let boundary = extract_boundary(&occupied);
    let estimate = box_counting_dim(&boundary, &default_scales(&boundary)).ok();
    let model = spec.model.as_ref().expect("rendered jobs carry a model");
    let (a, b, f) = model.couplings();
    let row = MetricsRow {
        job_id: spec.id.clone(),
        model: model.name().to_string(),
        a,
        b,
        f,
        c: spec.parameter.iter().map(|&z| format_complex(z)).collect(),
        budget: spec.iterations,
        radius: spec.radius,
        resolution: spec.resolution.clone(),
        component_count: labels.component_count,
        occupied_cells: occupied.count(),
        boxdim_slope: estimate.as_ref().map(|e| e.slope),
        boxdim_r2: estimate.as_ref().map(|e| e.r_squared),
    };
    Ok((row, labels))
}

fn field_artifacts(id: &str, rendered: &Rendered, out: &mut Vec<(String, Vec<u8>)>) -> Result<()> {
    match rendered {
        Rendered::Planar(field) => {
            for k in 0..field.nodes() {
                out.push((format!("{id}-z{}.pgm", k + 1), encode_field_image(field, Layer::Node(k))?));
            }
            out.push((format!("{id}-intersection.pgm"), encode_field_image(field, Layer::Intersection)?));
        }
        Rendered::Solid(field) => out.push((format!("{id}.vox"), encode_voxels(&field.occupancy()))),
    }
    Ok(())
}

/// Runs a job to completion, then writes its artifacts and `manifest.txt`
/// into the output directory.
pub fn run_job(spec: &JobSpec) -> Result<JobReport> {
    let mut artifacts: Vec<(String, Vec<u8>)> = Vec::new();
    let mut metrics = Vec::new();
    let mut checks = Vec::new();
    match spec.kind {
        JobKind::Render(_) => {
            let rendered = render_job(spec)?;
            field_artifacts(&spec.id, &rendered, &mut artifacts)?;
            metrics.push(measure(spec, &rendered)?.0);
        }
        JobKind::Sweep => {
            for job in expand_sweep(spec)? {
                let rendered = render_job(&job)?;
                field_artifacts(&job.id, &rendered, &mut artifacts)?;
                metrics.push(measure(&job, &rendered)?.0);
            }
        }
        JobKind::Analyze => {
            let rendered = render_job(spec)?;
            let (row, labels) = measure(spec, &rendered)?;
            let mut sizes = String::from("component,cells\n");
            for (k, size) in labels.sizes().iter().enumerate() {
                let _ = writeln!(sizes, "{},{size}", k + 1);
            }
            artifacts.push((format!("{}-components.csv", spec.id), sizes.into_bytes()));
            metrics.push(row);
        }
        JobKind::Verify => {
            let check = spec
                .check
                .ok_or_else(|| Error::domain(format!("verify job {} names no check", spec.id)))?;
            checks = run_check(check, spec)?;
            let mut text = format!(
                "check {}\nresolution {}\niterations {}\nradius {}\ntolerance {}\n",
                check.name(),
                spec.resolution.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("x"),
                spec.iterations,
                format_real(spec.radius),
                format_real(spec.tolerance)
            );
            for line in &checks {
                text.push_str(&line.to_text());
                text.push('\n');
            }
            let verdict = if checks.iter().all(|c| c.pass) { "PASS" } else { "FAIL" };
            let _ = writeln!(text, "verdict {verdict}");
            artifacts.push((format!("{}-verify.txt", spec.id), text.into_bytes()));
        }
    }
    if !metrics.is_empty() {
        artifacts.push((METRICS_FILE.to_string(), metrics_csv(&metrics).into_bytes()));
    }
    let manifest = write_artifacts(&spec.output_dir, &artifacts)?;
    Ok(JobReport {
        manifest,
        metrics,
        checks,
    })
}
