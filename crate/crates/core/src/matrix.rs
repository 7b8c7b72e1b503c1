//! Paraxial ray-transfer matrices of the chiral thick lens.
//!
//! Rays are `(height, reduced angle)` with reduced angle `u = n·θ`, so every
//! matrix here is unimodular. Object distances are measured from the front
//! vertex V1, image and screen distances from the back vertex V2.

use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::{BackgroundMedium, ChiralMedium, DispersionModel, PolarizationMode};

/// Default threshold on `|1/f|` (1/m) below which a lens is treated as afocal.
pub const FOCUS_EPSILON: f64 = 1e-9;

/// `|C·d_o/n_p1 + D|` below this means the image is at infinity.
pub const CONJUGATE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub height: f64,
    pub reduced_angle: f64,
}

impl Ray {
    pub fn new(height: f64, reduced_angle: f64) -> Self {
        Self {
            height,
            reduced_angle,
        }
    }
}

/// 2×2 ABCD matrix acting on `(height, reduced angle)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayTransferMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RayTransferMatrix {
    pub const IDENTITY: RayTransferMatrix = RayTransferMatrix {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// Free propagation over `length` in a medium of index `index`.
    pub fn translation(length: f64, index: f64) -> Result<Self> {
        if !(index > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "translation index must be positive, got {index}"
            )));
        }
        Ok(Self::new(1.0, length / index, 0.0, 1.0))
    }

    /// Thin refracting element of power `power` (1/m).
    pub fn refraction(power: f64) -> Self {
        Self::new(1.0, 0.0, -power, 1.0)
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, ray: Ray) -> Ray {
        Ray {
            height: self.a * ray.height + self.b * ray.reduced_angle,
            reduced_angle: self.c * ray.height + self.d * ray.reduced_angle,
        }
    }
}

impl Mul for RayTransferMatrix {
    type Output = RayTransferMatrix;

    fn mul(self, rhs: RayTransferMatrix) -> RayTransferMatrix {
        RayTransferMatrix {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }
}

/// `(n_after - n_before) / radius`.
///
/// First surface: `refracting_power(r1, n_p1, n_p2)`; second surface:
/// `refracting_power(r2, n_p2, n_p1)`.
pub fn refracting_power(radius: f64, n_before: f64, n_after: f64) -> Result<f64> {
    if radius == 0.0 {
        return Err(Error::DegenerateSurface);
    }
    Ok((n_after - n_before) / radius)
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `n·(r2 - r1) + d·(n - n1)`, evaluated with error-free transforms.
///
/// This is the curvature-plus-thickness factor of the focal power scaled by
/// `n·r1·r2`. It cancels for near-concentric menisci, where the naive sum
/// loses most of its digits.
pub(crate) fn bracket_numerator(n: f64, n1: f64, r1: f64, r2: f64, d: f64) -> f64 {
    let (dr, e_dr) = two_sum(r2, -r1);
    let (jump, e_jump) = two_sum(n, -n1);
    let (p1, e1) = two_prod(n, dr);
    let (p2, e2) = two_prod(d, jump);
    let (h, e_h) = two_sum(p1, p2);
    h + (e_h + e1 + e2 + n.mul_add(e_dr, d * e_jump))
}

/// Placement of the two surface powers in the thick-lens matrix.
///
/// `Swapped` (the default) puts `D2` in the A entry and `D1` in the D entry; `Standard` is the
/// ordered product `refraction(D2) · translation · refraction(D1)`. The two
/// agree whenever `D1 == D2`, e.g. for a symmetric biconvex lens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Composition {
    #[default]
    Swapped,
    Standard,
}

/// Thick lens with two spherical surfaces in a uniform background.
///
/// A radius is positive when its center of curvature lies to the right of the
/// vertex, so a biconvex lens has `r1 > 0` and `r2 < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThickLensSpec {
    r1: f64,
    r2: f64,
    thickness: f64,
    aperture_radius: f64,
    medium: ChiralMedium,
    background: BackgroundMedium,
    composition: Composition,
}

impl ThickLensSpec {
    pub const DEFAULT_RADIUS: f64 = 0.1;
    pub const DEFAULT_THICKNESS: f64 = 0.02;
    pub const DEFAULT_APERTURE: f64 = 5e-4;
    pub const DEFAULT_KAPPA: f64 = 0.5;

    /// Validated lens. Besides the geometric checks, the LCP phase index must
    /// stay positive over the whole dispersion band.
    pub fn new(
        r1: f64,
        r2: f64,
        thickness: f64,
        aperture_radius: f64,
        medium: ChiralMedium,
        background: BackgroundMedium,
    ) -> Result<Self> {
        let lens = Self::unchecked(r1, r2, thickness, aperture_radius, medium, background)?;
        let min_lcp = lens.medium.min_lcp_index();
        if min_lcp <= 0.0 {
            return Err(Error::NonPhysical(format!(
                "LCP phase index reaches {min_lcp} inside the dispersion band (kappa = {})",
                lens.medium.kappa()
            )));
        }
        Ok(lens)
    }

    fn unchecked(
        r1: f64,
        r2: f64,
        thickness: f64,
        aperture_radius: f64,
        medium: ChiralMedium,
        background: BackgroundMedium,
    ) -> Result<Self> {
        if r1 == 0.0 || r2 == 0.0 {
            return Err(Error::DegenerateSurface);
        }
        if !(r1.is_finite() && r2.is_finite()) {
            return Err(Error::InvalidParameter("radii must be finite".into()));
        }
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "thickness must be positive, got {thickness}"
            )));
        }
        if !(aperture_radius > 0.0 && aperture_radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "aperture radius must be positive, got {aperture_radius}"
            )));
        }
        Ok(Self {
            r1,
            r2,
            thickness,
            aperture_radius,
            medium,
            background,
            composition: Composition::Swapped,
        })
    }

    /// Symmetric biconvex lens (R = 0.1 m, d = 20 mm, aperture radius 0.5 mm) in vacuum
    /// with the default calibrated material at `kappa`.
    pub fn default_biconvex(kappa: f64) -> Result<Self> {
        let medium = ChiralMedium::new(DispersionModel::default_calibration(), kappa, "default")?;
        Self::new(
            Self::DEFAULT_RADIUS,
            -Self::DEFAULT_RADIUS,
            Self::DEFAULT_THICKNESS,
            Self::DEFAULT_APERTURE,
            medium,
            BackgroundMedium::vacuum(),
        )
    }

    pub fn with_composition(mut self, composition: Composition) -> Self {
        self.composition = composition;
        self
    }

    /// Copy with a different chirality. Band-wide positivity of the LCP index
    /// is not re-checked; evaluation at a given frequency still rejects
    /// non-positive indices.
    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        let mut lens = self.clone();
        lens.medium = self.medium.with_kappa(kappa)?;
        Ok(lens)
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn aperture_radius(&self) -> f64 {
        self.aperture_radius
    }

    pub fn medium(&self) -> &ChiralMedium {
        &self.medium
    }

    pub fn background(&self) -> &BackgroundMedium {
        &self.background
    }

    pub fn background_index(&self) -> f64 {
        self.background.index()
    }

    pub fn composition(&self) -> Composition {
        self.composition
    }

    pub fn phase_index(&self, omega_offset: f64, mode: PolarizationMode) -> Result<f64> {
        self.medium.phase_index(omega_offset, mode)
    }

    /// Surface powers `(D1, D2)` at the given frequency and mode.
    pub fn surface_powers(&self, omega_offset: f64, mode: PolarizationMode) -> Result<(f64, f64)> {
        let n2 = self.phase_index(omega_offset, mode)?;
        let n1 = self.background_index();
        Ok((
            refracting_power(self.r1, n1, n2)?,
            refracting_power(self.r2, n2, n1)?,
        ))
    }

    /// ABCD matrix from V1 to V2.
    pub fn matrix(&self, omega_offset: f64, mode: PolarizationMode) -> Result<RayTransferMatrix> {
        let n2 = self.phase_index(omega_offset, mode)?;
        let (d1, d2) = self.surface_powers(omega_offset, mode)?;
        let t = self.thickness / n2;
        // D2·D1·t - D1 - D2, factored
        let c = -self.power_factor(n2);
        let m = match self.composition {
            Composition::Swapped => RayTransferMatrix::new(1.0 - d2 * t, t, c, 1.0 - d1 * t),
            Composition::Standard => RayTransferMatrix::new(1.0 - d1 * t, t, c, 1.0 - d2 * t),
        };
        Ok(m)
    }

    /// Inverse focal length `1/f` (1/m), closed form.
    pub fn inverse_focal_length(&self, omega_offset: f64, mode: PolarizationMode) -> Result<f64> {
        let n2 = self.phase_index(omega_offset, mode)?;
        Ok(self.power_factor(n2) / self.background_index())
    }

    /// `(n - n1)·[(1/r1 - 1/r2) + d/n·(n - n1)/(r1·r2)]`, i.e. `-C`.
    fn power_factor(&self, n2: f64) -> f64 {
        let n1 = self.background_index();
        let numerator = bracket_numerator(n2, n1, self.r1, self.r2, self.thickness);
        (n2 - n1) * (numerator / (n2 * self.r1 * self.r2))
    }

    /// Effective focal length (in the background medium).
    pub fn focal_length(&self, omega_offset: f64, mode: PolarizationMode) -> Result<f64> {
        self.focal_length_with_epsilon(omega_offset, mode, FOCUS_EPSILON)
    }

    pub fn focal_length_with_epsilon(
        &self,
        omega_offset: f64,
        mode: PolarizationMode,
        epsilon: f64,
    ) -> Result<f64> {
        let inverse = self.inverse_focal_length(omega_offset, mode)?;
        if inverse.abs() < epsilon {
            return Err(Error::InfiniteFocus {
                inverse_focal: inverse,
            });
        }
        Ok(1.0 / inverse)
    }

    /// `T(screen) · M · T(object)` with translations in the background.
    pub fn system_matrix(
        &self,
        omega_offset: f64,
        mode: PolarizationMode,
        object_distance: f64,
        screen_distance: f64,
    ) -> Result<RayTransferMatrix> {
        if !(object_distance >= 0.0) || !(screen_distance >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "object and screen distances must be >= 0 (got {object_distance}, {screen_distance})"
            )));
        }
        let n1 = self.background_index();
        let lens = self.matrix(omega_offset, mode)?;
        Ok(RayTransferMatrix::translation(screen_distance, n1)?
            * lens
            * RayTransferMatrix::translation(object_distance, n1)?)
    }

    /// Conjugate image of an object `object_distance` in front of V1.
    pub fn solve_image(
        &self,
        omega_offset: f64,
        mode: PolarizationMode,
        object_distance: f64,
    ) -> Result<ImagingSolution> {
        if !(object_distance > 0.0 && object_distance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "object distance must be positive, got {object_distance}"
            )));
        }
        let n1 = self.background_index();
        let m = self.matrix(omega_offset, mode)?;
        let reduced = object_distance / n1;
        let denom = m.c * reduced + m.d;
        if denom.abs() < CONJUGATE_EPSILON {
            return Err(Error::ImageAtInfinity);
        }
        let image_distance = -n1 * (m.a * reduced + m.b) / denom;
        let magnification = m.a + image_distance / n1 * m.c;
        let focal_length = match self.focal_length(omega_offset, mode) {
            Ok(f) => Some(f),
            Err(Error::InfiniteFocus { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(ImagingSolution {
            image_distance,
            magnification,
            focal_length,
            is_real: image_distance > 0.0,
        })
    }

    /// Cardinal-point distances for reporting.
    pub fn cardinal_points(&self, omega_offset: f64, mode: PolarizationMode) -> Result<CardinalPoints> {
        let m = self.matrix(omega_offset, mode)?;
        let n1 = self.background_index();
        if m.c.abs() < FOCUS_EPSILON {
            return Err(Error::InfiniteFocus { inverse_focal: -m.c / n1 });
        }
        Ok(CardinalPoints {
            focal_length: -n1 / m.c,
            back_focal_distance: -n1 * m.a / m.c,
            front_focal_distance: -n1 * m.d / m.c,
            front_principal_plane: n1 * (m.d - 1.0) / m.c,
            back_principal_plane: n1 * (1.0 - m.a) / m.c,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagingSolution {
    /// From V2; negative for a virtual image left of the lens.
    pub image_distance: f64,
    pub magnification: f64,
    /// `None` when the lens is afocal at this frequency and mode.
    pub focal_length: Option<f64>,
    pub is_real: bool,
}

/// Derived cardinal-point distances, all in meters.
///
/// Focal distances are positive for a converging lens: the back focal point
/// sits `back_focal_distance` right of V2 and the front focal point
/// `front_focal_distance` left of V1. Principal planes are signed positions
/// relative to V1 (front) and V2 (back), positive to the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CardinalPoints {
    pub focal_length: f64,
    pub back_focal_distance: f64,
    pub front_focal_distance: f64,
    pub front_principal_plane: f64,
    pub back_principal_plane: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::{ChannelSpec, DispersionModel};
    use proptest::prelude::*;

    const LCP: PolarizationMode = PolarizationMode::Lcp;
    const RCP: PolarizationMode = PolarizationMode::Rcp;

    fn red_offset() -> f64 {
        DispersionModel::default_calibration()
            .channel_offset(&ChannelSpec::rgb_defaults()[0])
            .unwrap()
    }

    fn flat_lens(eps: f64, kappa: f64, r1: f64, r2: f64, d: f64) -> ThickLensSpec {
        let model = DispersionModel::flat(eps, crate::media::angular_frequency(550e-9)).unwrap();
        let medium = ChiralMedium::new(model, kappa, "flat").unwrap();
        ThickLensSpec::new(r1, r2, d, 0.01, medium, BackgroundMedium::vacuum()).unwrap()
    }

    #[test]
    fn refracting_power_examples() {
        assert_eq!(refracting_power(0.1, 1.0, 2.5).unwrap(), 15.0);
        assert_eq!(refracting_power(0.1, 1.7, 1.7).unwrap(), 0.0);
        assert!(((1.0 - 2.5) / -0.1 - refracting_power(-0.1, 2.5, 1.0).unwrap()).abs() < 1e-12);
        assert!((refracting_power(-0.1, 2.5, 1.0).unwrap() - 15.0).abs() < 1e-12);
        assert!(matches!(refracting_power(0.0, 1.0, 2.0), Err(Error::DegenerateSurface)));
    }

    #[test]
    fn translation_examples() {
        assert_eq!(
            RayTransferMatrix::translation(0.0, 2.5).unwrap(),
            RayTransferMatrix::IDENTITY
        );
        let t = RayTransferMatrix::translation(0.02, 2.5).unwrap();
        assert!((t.b - 0.008).abs() < 1e-15);
        assert_eq!(t.determinant(), 1.0);
        assert!(RayTransferMatrix::translation(1.0, 0.0).is_err());
    }

    #[test]
    fn symmetric_lens_matches_explicit_product() {
        let lens = ThickLensSpec::default_biconvex(0.5).unwrap();
        let w = red_offset();
        for mode in PolarizationMode::ALL {
            // Oracle: surface · translation · surface, built by hand.
            let n = 2.8 + if mode == LCP { -0.5 } else { 0.5 };
            let p1 = (n - 1.0) / 0.1;
            let p2 = (1.0 - n) / -0.1;
            let s1 = [[1.0, 0.0], [-p1, 1.0]];
            let tr = [[1.0, 0.02 / n], [0.0, 1.0]];
            let s2 = [[1.0, 0.0], [-p2, 1.0]];
            let mul = |x: [[f64; 2]; 2], y: [[f64; 2]; 2]| {
                let mut z = [[0.0; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        z[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
                    }
                }
                z
            };
            let expect = mul(s2, mul(tr, s1));
            let m = lens.matrix(w, mode).unwrap();
            for (got, want) in [(m.a, expect[0][0]), (m.b, expect[0][1]), (m.c, expect[1][0]), (m.d, expect[1][1])] {
                assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "{mode}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn composition_differs_only_for_asymmetric_lens() {
        let lens = flat_lens(4.0, 0.3, 0.05, -0.2, 0.01);
        let swapped = lens.matrix(0.0, RCP).unwrap();
        let standard = lens.clone().with_composition(Composition::Standard).matrix(0.0, RCP).unwrap();
        assert_eq!(swapped.a, standard.d);
        assert_eq!(swapped.d, standard.a);
        assert_eq!(swapped.b, standard.b);
        assert_eq!(swapped.c, standard.c);
        let (d1, d2) = lens.surface_powers(0.0, RCP).unwrap();
        let product = RayTransferMatrix::refraction(d2)
            * RayTransferMatrix::translation(0.01, 2.3).unwrap()
            * RayTransferMatrix::refraction(d1);
        assert!((product.a - standard.a).abs() < 1e-14);
        assert!((product.d - standard.d).abs() < 1e-14);
    }

    #[test]
    fn thin_limit_matrix() {
        let lens = flat_lens(6.25, 0.0, 0.1, -0.1, 1e-12);
        let m = lens.matrix(0.0, LCP).unwrap();
        let (d1, d2) = lens.surface_powers(0.0, LCP).unwrap();
        assert!((m.a - 1.0).abs() < 1e-9 && (m.d - 1.0).abs() < 1e-9);
        assert!(m.b.abs() < 1e-12);
        assert!((m.c + d1 + d2).abs() < 1e-9);
    }

    #[test]
    fn focal_length_red_lcp_kappa_one() {
        // n = 1.8, D1 = D2 = 8, C = 64·0.02/1.8 - 16 = -688/45.
        let lens = ThickLensSpec::default_biconvex(1.0).unwrap();
        let f = lens.focal_length(red_offset(), LCP).unwrap();
        assert!((f - 45.0 / 688.0).abs() < 1e-14, "{f}");
        let c = lens.matrix(red_offset(), LCP).unwrap().c;
        assert!((f - (-1.0 / c)).abs() < 1e-12 * f);
    }

    #[test]
    fn index_matched_lens_is_afocal() {
        let lens = ThickLensSpec::default_biconvex(1.8).unwrap();
        assert!(matches!(
            lens.focal_length(red_offset(), LCP),
            Err(Error::InfiniteFocus { .. })
        ));
        // the image still exists: the lens acts as a slab
        let sol = lens.solve_image(red_offset(), LCP, 0.5).unwrap();
        assert!(sol.focal_length.is_none());
        assert!(!sol.is_real);
    }

    #[test]
    fn thin_lens_lensmaker_and_gaussian_equation() {
        let n: f64 = 2.5;
        let lens = flat_lens(n * n, 0.0, 0.1, -0.1, 1e-12);
        let f = lens.focal_length(0.0, LCP).unwrap();
        let lensmaker = 1.0 / ((n - 1.0) * (1.0 / 0.1 + 1.0 / 0.1));
        assert!((f - lensmaker).abs() < 1e-9 * f);
        for d_o in [0.05, 0.2, 0.5, 3.0] {
            let sol = lens.solve_image(0.0, LCP, d_o).unwrap();
            let lhs = 1.0 / d_o + 1.0 / sol.image_distance;
            assert!((lhs - 1.0 / f).abs() < 1e-9 / f, "{d_o}");
        }
    }

    #[test]
    fn image_at_infinity_on_front_focal_plane() {
        let lens = flat_lens(6.25, 0.0, 0.1, -0.1, 0.02);
        let cp = lens.cardinal_points(0.0, RCP).unwrap();
        assert!(matches!(
            lens.solve_image(0.0, RCP, cp.front_focal_distance),
            Err(Error::ImageAtInfinity)
        ));
    }

    #[test]
    fn solve_image_matches_bisection_oracle() {
        let lens = ThickLensSpec::default_biconvex(ThickLensSpec::DEFAULT_KAPPA).unwrap();
        let model = DispersionModel::default_calibration();
        let d_o = 0.5;
        for ch in ChannelSpec::rgb_defaults() {
            let w = model.channel_offset(&ch).unwrap();
            for mode in PolarizationMode::ALL {
                let m = lens.matrix(w, mode).unwrap();
                // B_sys(d_i) = A d_o + B + d_i (C d_o + D), bisected on (0, 10 m)
                let b_sys = |di: f64| m.a * d_o + m.b + di * (m.c * d_o + m.d);
                let (mut lo, mut hi) = (1e-6, 10.0);
                assert!(b_sys(lo).signum() != b_sys(hi).signum());
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if b_sys(mid).signum() == b_sys(lo).signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let oracle = 0.5 * (lo + hi);
                let sol = lens.solve_image(w, mode, d_o).unwrap();
                assert!((sol.image_distance - oracle).abs() < 1e-12, "{mode}");
                let mag = m.a + oracle * m.c;
                assert!((sol.magnification - mag).abs() < 1e-9);
                assert!(sol.is_real);
            }
        }
    }

    #[test]
    fn conjugate_plane_zeroes_b() {
        let lens = ThickLensSpec::default_biconvex(0.5).unwrap();
        let w = red_offset();
        let sol = lens.solve_image(w, RCP, 0.5).unwrap();
        let sys = lens.system_matrix(w, RCP, 0.5, sol.image_distance).unwrap();
        assert!(sys.b.abs() < 1e-9);
        assert!((sys.a - sol.magnification).abs() < 1e-12);
        let bare = lens.system_matrix(w, RCP, 0.0, 0.0).unwrap();
        assert_eq!(bare, lens.matrix(w, RCP).unwrap());
    }

    #[test]
    fn cardinal_points_are_consistent() {
        let lens = flat_lens(4.0, 0.2, 0.08, -0.15, 0.015).with_composition(Composition::Standard);
        let cp = lens.cardinal_points(0.0, RCP).unwrap();
        let f = lens.focal_length(0.0, RCP).unwrap();
        assert!((cp.focal_length - f).abs() < 1e-12 * f);
        // back focal point minus principal plane gives f
        assert!((cp.back_focal_distance - cp.back_principal_plane - f).abs() < 1e-12);
        assert!((cp.front_focal_distance + cp.front_principal_plane - f).abs() < 1e-12);
    }

    #[test]
    fn bracket_numerator_survives_cancellation() {
        use num::{BigRational, ToPrimitive};
        let q = |v: f64| BigRational::from_float(v).unwrap();
        // near-concentric meniscus; the factor vanishes near d = 0.0137226
        let (n, r1, r2) = (1.0786, 0.2806, 0.2796);
        for d in [0.0135, 0.013_722_6, 0.013_722_646] {
            let exact = (q(n) * (q(r2) - q(r1)) + q(d) * (q(n) - q(1.0))).to_f64().unwrap();
            let got = bracket_numerator(n, 1.0, r1, r2, d);
            assert!((got - exact).abs() <= 2.0 * f64::EPSILON * exact.abs(), "{got} vs {exact}");
        }
    }

    proptest! {
        #[test]
        fn matrices_are_unimodular(
            r1 in 0.02f64..1.0, s1 in any::<bool>(),
            r2 in 0.02f64..1.0, s2 in any::<bool>(),
            d in 0.001f64..0.05, kappa in 0.0f64..1.5,
            frac in -1.0f64..1.0, d_o in 0.01f64..5.0, d_s in 0.0f64..5.0,
            swapped in any::<bool>(),
        ) {
            let r1 = if s1 { r1 } else { -r1 };
            let r2 = if s2 { r2 } else { -r2 };
            let medium = ChiralMedium::new(DispersionModel::default_calibration(), kappa, "").unwrap();
            let comp = if swapped { Composition::Swapped } else { Composition::Standard };
            let lens = ThickLensSpec::new(r1, r2, d, 0.01, medium, BackgroundMedium::vacuum())
                .unwrap()
                .with_composition(comp);
            let w = frac * lens.medium().dispersion().band().1;
            for mode in PolarizationMode::ALL {
                let m = lens.matrix(w, mode).unwrap();
                let det = m.determinant();
                prop_assert!((det - 1.0).abs() < 1e-12, "lens det {}", det);
                let sys = lens.system_matrix(w, mode, d_o, d_s).unwrap();
                let scale = sys.a.abs().max(sys.b.abs()).max(sys.c.abs()).max(sys.d.abs());
                prop_assert!((sys.determinant() - 1.0).abs() < 1e-12 * scale * scale);
            }
        }

        #[test]
        fn zero_kappa_degenerate(frac in -1.0f64..1.0, d_o in 0.05f64..2.0) {
            let lens = ThickLensSpec::default_biconvex(0.0).unwrap();
            let w = frac * lens.medium().dispersion().band().1;
            prop_assert_eq!(lens.matrix(w, LCP).unwrap(), lens.matrix(w, RCP).unwrap());
            let l = lens.solve_image(w, LCP, d_o);
            let r = lens.solve_image(w, RCP, d_o);
            match (l, r) {
                (Ok(l), Ok(r)) => prop_assert_eq!(l, r),
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "mode results diverge"),
            }
        }
    }

    #[test]
    fn chirality_response_of_biconvex_lens() {
        let w = red_offset();
        let mut prev_rcp = f64::INFINITY;
        let mut prev_lcp = 0.0;
        let mut k = 0.0;
        while k < 1.79 {
            let lens = ThickLensSpec::default_biconvex(0.0).unwrap().with_kappa(k).unwrap();
            let fr = lens.focal_length(w, RCP).unwrap();
            let fl = lens.focal_length(w, LCP).unwrap();
            assert!(fr < prev_rcp && fr > 0.0);
            assert!(fl > prev_lcp && fl > 0.0);
            prev_rcp = fr;
            prev_lcp = fl;
            k += 0.01;
        }
        for k in [1.81, 2.0, 2.5] {
            let lens = ThickLensSpec::default_biconvex(0.0).unwrap().with_kappa(k).unwrap();
            assert!(lens.focal_length(w, LCP).unwrap() < 0.0);
        }
    }
}
