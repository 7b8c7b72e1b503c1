//! Exact meridional ray tracing through the two spherical surfaces.
//!
//! Used as an independent check of the paraxial matrices: the trace applies
//! the mode-dependent Snell law at the real surface intersection points,
//! with no small-angle approximation anywhere.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{Ray, ThickLensSpec};
use crate::media::{mode_index, PolarizationMode};

/// Transmission angle across an achiral → chiral interface.
///
/// RCP sees the effective index `sqrt(eps_r2) + kappa`, LCP sees
/// `sqrt(eps_r2) - kappa`; both satisfy `n1 sin θi = n_eff sin θt`.
pub fn chiral_snell(
    incidence_angle: f64,
    n1: f64,
    eps_r2: f64,
    kappa: f64,
    mode: PolarizationMode,
) -> Result<f64> {
    if !(incidence_angle.abs() < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!(
            "incidence angle {incidence_angle} rad not in (-π/2, π/2)"
        )));
    }
    if !(eps_r2 > 0.0) {
        return Err(Error::NonPhysical(format!("relative permittivity {eps_r2} <= 0")));
    }
    let n_eff = mode_index(eps_r2.sqrt(), kappa, mode);
    if n_eff <= 0.0 {
        return Err(Error::NonPhysical(format!(
            "{mode} effective index {n_eff} <= 0"
        )));
    }
    refract(incidence_angle, n1, n_eff, 1)
}

fn refract(angle: f64, n_from: f64, n_to: f64, surface: usize) -> Result<f64> {
    let s = n_from * angle.sin() / n_to;
    if s.abs() > 1.0 {
        return Err(Error::TotalInternalReflection { surface });
    }
    Ok(s.asin())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceHit {
    /// 1 for the front surface, 2 for the back surface.
    pub surface: usize,
    /// Axial coordinate from V1, m.
    pub z: f64,
    /// Transverse height, m.
    pub y: f64,
    pub incidence_angle: f64,
    pub transmission_angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStatus {
    Ok,
    MissedSurface,
    TotalInternalReflection,
}

/// Exit ray referenced to the V2 plane, with its true (geometric) angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitRay {
    pub height: f64,
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    pub exit_ray: Option<ExitRay>,
    pub surface_hits: Vec<SurfaceHit>,
    pub status: TraceStatus,
    /// Surface at which the trace stopped, when `status` is not `Ok`.
    pub failed_surface: Option<usize>,
}

impl TraceResult {
    /// Exit state in reduced form `(height, n·θ)`.
    pub fn reduced_exit(&self, background_index: f64) -> Option<Ray> {
        self.exit_ray
            .map(|e| Ray::new(e.height, background_index * e.angle))
    }

    pub fn into_result(self) -> Result<TraceResult> {
        match (self.status, self.failed_surface) {
            (TraceStatus::Ok, _) => Ok(self),
            (TraceStatus::MissedSurface, s) => Err(Error::MissedSurface {
                surface: s.unwrap_or(0),
            }),
            (TraceStatus::TotalInternalReflection, s) => Err(Error::TotalInternalReflection {
                surface: s.unwrap_or(0),
            }),
        }
    }
}

#[derive(Clone, Copy)]
struct Vec2 {
    z: f64,
    y: f64,
}

impl Vec2 {
    fn dot(self, o: Vec2) -> f64 {
        self.z * o.z + self.y * o.y
    }

    fn cross(self, o: Vec2) -> f64 {
        self.z * o.y - self.y * o.z
    }

    fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2 {
            z: self.z * c - self.y * s,
            y: self.z * s + self.y * c,
        }
    }
}

/// Intersection of the ray `origin + t·dir` (unit `dir`) with the sphere of
/// signed radius `radius` whose vertex sits at `vertex_z`. Only the cap that
/// contains the vertex is considered.
fn intersect_cap(origin: Vec2, dir: Vec2, vertex_z: f64, radius: f64) -> Option<Vec2> {
    let center_z = vertex_z + radius;
    let wz = origin.z - center_z;
    let wy = origin.y;
    let b = dir.z * wz + dir.y * wy;
    // |w|² - R², factored to keep precision near the vertex
    let c = (wz - radius) * (wz + radius) + wy * wy;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let q = if b > 0.0 { -b - root } else { -b + root };
    let mut roots = [q, if q != 0.0 { c / q } else { -b }];
    roots.sort_by(|a, b| a.total_cmp(b));
    roots.into_iter().find_map(|t| {
        let p = Vec2 {
            z: origin.z + t * dir.z,
            y: origin.y + t * dir.y,
        };
        // cap side: the point lies on the vertex side of the center
        ((center_z - p.z) * radius.signum() > 0.0).then_some(p)
    })
}

/// Traces one meridional ray that crosses the V1 plane at `entry_height` with
/// geometric angle `entry_angle`.
pub fn trace_meridional(
    lens: &ThickLensSpec,
    entry_height: f64,
    entry_angle: f64,
    omega_offset: f64,
    mode: PolarizationMode,
) -> Result<TraceResult> {
    let aperture = lens.aperture_radius();
    if !(entry_height.abs() < aperture) {
        return Err(Error::InvalidParameter(format!(
            "entry height {entry_height} m not inside aperture radius {aperture} m"
        )));
    }
    let n1 = lens.background_index();
    let n_eff = lens.phase_index(omega_offset, mode)?;

    let mut hits = Vec::with_capacity(2);
    let stop = |hits: Vec<SurfaceHit>, status, surface| TraceResult {
        exit_ray: None,
        surface_hits: hits,
        status,
        failed_surface: Some(surface),
    };

    let mut pos = Vec2 {
        z: 0.0,
        y: entry_height,
    };
    let mut dir = Vec2 {
        z: entry_angle.cos(),
        y: entry_angle.sin(),
    };

    let surfaces = [(1usize, 0.0, lens.r1(), n1, n_eff), (2, lens.thickness(), lens.r2(), n_eff, n1)];
    for (surface, vertex_z, radius, n_from, n_to) in surfaces {
        let Some(hit) = intersect_cap(pos, dir, vertex_z, radius) else {
            return Ok(stop(hits, TraceStatus::MissedSurface, surface));
        };
        if hit.y.abs() > aperture {
            return Ok(stop(hits, TraceStatus::MissedSurface, surface));
        }
        let center_z = vertex_z + radius;
        let normal = Vec2 {
            z: (center_z - hit.z) / radius,
            y: (0.0 - hit.y) / radius,
        };
        let incidence = normal.cross(dir).atan2(normal.dot(dir));
        let transmitted = match refract(incidence, n_from, n_to, surface) {
            Ok(t) => t,
            Err(_) => return Ok(stop(hits, TraceStatus::TotalInternalReflection, surface)),
        };
        hits.push(SurfaceHit {
            surface,
            z: hit.z,
            y: hit.y,
            incidence_angle: incidence,
            transmission_angle: transmitted,
        });
        pos = hit;
        dir = normal.rotated(transmitted);
    }

    let height = pos.y + (lens.thickness() - pos.z) * dir.y / dir.z;
    Ok(TraceResult {
        exit_ray: Some(ExitRay {
            height,
            angle: dir.y.atan2(dir.z),
        }),
        surface_hits: hits,
        status: TraceStatus::Ok,
        failed_surface: None,
    })
}

/// One row of [`paraxial_agreement_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgreementRow {
    pub height: f64,
    pub exact: Ray,
    pub paraxial: Ray,
    /// Euclidean norm of (Δheight, Δreduced angle).
    pub residual: f64,
}

/// Exact trace vs ABCD matrix for collimated input rays at `heights`.
pub fn paraxial_agreement_report(
    lens: &ThickLensSpec,
    omega_offset: f64,
    mode: PolarizationMode,
    heights: &[f64],
) -> Result<Vec<AgreementRow>> {
    if heights.is_empty() {
        return Err(Error::InvalidParameter("no heights given".into()));
    }
    if heights.iter().any(|h| !(*h >= 0.0)) || heights.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "heights must be non-negative and strictly ascending".into(),
        ));
    }
    let n1 = lens.background_index();
    let matrix = lens.matrix(omega_offset, mode)?;
    heights
        .par_iter()
        .map(|&h| {
            let traced = trace_meridional(lens, h, 0.0, omega_offset, mode)?.into_result()?;
            let exact = traced.reduced_exit(n1).expect("ok trace has an exit ray");
            let paraxial = matrix.apply(Ray::new(h, 0.0));
            let residual = (exact.height - paraxial.height)
                .hypot(exact.reduced_angle - paraxial.reduced_angle);
            Ok(AgreementRow {
                height: h,
                exact,
                paraxial,
                residual,
            })
        })
        .collect()
}

/// Observed convergence orders `log2(res(2h) / res(h))` for a report built on
/// a doubling height sequence (h, 2h, 4h, ...).
pub fn convergence_orders(rows: &[AgreementRow]) -> Vec<f64> {
    rows.windows(2)
        .map(|w| (w[1].residual / w[0].residual).log2())
        .collect()
}
