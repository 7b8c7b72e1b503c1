//! Uniform disc (circle of confusion) kernel rasterized by exact area
//! coverage, and "same"-size convolution with zero boundary.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::plane::Plane;

/// Kernels with at most this many taps are applied directly; larger ones go
/// through the FFT.
const DIRECT_TAPS_LIMIT: usize = 15 * 15;

/// Area of the disc of radius `r` (centered at the origin) inside `[0,x]×[0,y]`
/// for `x, y >= 0`.
fn quadrant_area(x: f64, y: f64, r: f64) -> f64 {
    let x = x.min(r);
    let y = y.min(r);
    if x <= 0.0 || y <= 0.0 {
        return 0.0;
    }
    let r2 = r * r;
    // the arc crosses height y at abscissa s
    let s = (r2 - y * y).max(0.0).sqrt();
    if x <= s {
        return x * y;
    }
    // ∫ sqrt(r² - t²) dt antiderivative
    let prim = |t: f64| 0.5 * (t * (r2 - t * t).max(0.0).sqrt() + r2 * (t / r).clamp(-1.0, 1.0).asin());
    y * s + prim(x) - prim(s)
}

fn signed_corner(x: f64, y: f64, r: f64) -> f64 {
    x.signum() * y.signum() * quadrant_area(x.abs(), y.abs(), r)
}

/// Exact area of the disc of radius `r` centered at the origin inside the
/// rectangle `[x0,x1]×[y0,y1]`.
pub fn disc_rect_overlap(x0: f64, x1: f64, y0: f64, y1: f64, r: f64) -> f64 {
    signed_corner(x1, y1, r) - signed_corner(x0, y1, r) - signed_corner(x1, y0, r)
        + signed_corner(x0, y0, r)
}

/// Normalized disc kernel of radius `radius` pixels, `(2k+1)²` taps
/// row-major, with half-size `k` capped at `max_half`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscKernel {
    pub half: usize,
    pub weights: Vec<f64>,
}

impl DiscKernel {
    pub fn new(radius: f64, max_half: usize) -> Self {
        assert!(radius >= 0.0 && radius.is_finite());
        if radius <= 0.5 {
            return Self {
                half: 0,
                weights: vec![1.0],
            };
        }
        let half = ((radius - 0.5).ceil() as usize).min(max_half);
        let side = 2 * half + 1;
        let norm = PI * radius * radius;
        let mut weights = Vec::with_capacity(side * side);
        for j in 0..side {
            let cy = j as f64 - half as f64;
            for i in 0..side {
                let cx = i as f64 - half as f64;
                let area = disc_rect_overlap(cx - 0.5, cx + 0.5, cy - 0.5, cy + 0.5, radius);
                weights.push(area / norm);
            }
        }
        Self { half, weights }
    }

    pub fn side(&self) -> usize {
        2 * self.half + 1
    }

    pub fn is_identity(&self) -> bool {
        self.half == 0
    }
}

/// Blurs `plane` with a disc of `radius` pixels. Pixels outside the plane are
/// treated as zero; the output has the input's size.
pub fn disc_blur(plane: &Plane, radius: f64) -> Plane {
    let max_half = plane.width.max(plane.height).saturating_sub(1);
    let kernel = DiscKernel::new(radius, max_half);
    if kernel.is_identity() {
        return plane.clone();
    }
    if kernel.weights.len() <= DIRECT_TAPS_LIMIT {
        convolve_direct(plane, &kernel)
    } else {
        convolve_fft(plane, &kernel)
    }
}

pub fn convolve_direct(plane: &Plane, kernel: &DiscKernel) -> Plane {
    let (w, h) = (plane.width as i64, plane.height as i64);
    let k = kernel.half as i64;
    let side = kernel.side();
    Plane::from_fn(plane.width, plane.height, |x, y| {
        let mut acc = 0.0;
        for dy in -k..=k {
            let sy = y as i64 - dy;
            if sy < 0 || sy >= h {
                continue;
            }
            let row = (dy + k) as usize * side;
            for dx in -k..=k {
                let sx = x as i64 - dx;
                if sx < 0 || sx >= w {
                    continue;
                }
                acc += kernel.weights[row + (dx + k) as usize] * plane.get(sx as usize, sy as usize);
            }
        }
        acc
    })
}

fn fft_2d(data: &mut [Complex<f64>], width: usize, height: usize, planner: &mut FftPlanner<f64>, inverse: bool) {
    let row_fft = if inverse {
        planner.plan_fft_inverse(width)
    } else {
        planner.plan_fft_forward(width)
    };
    for row in data.chunks_exact_mut(width) {
        row_fft.process(row);
    }
    let col_fft = if inverse {
        planner.plan_fft_inverse(height)
    } else {
        planner.plan_fft_forward(height)
    };
    let mut column = vec![Complex::new(0.0, 0.0); height];
    for x in 0..width {
        for y in 0..height {
            column[y] = data[y * width + x];
        }
        col_fft.process(&mut column);
        for y in 0..height {
            data[y * width + x] = column[y];
        }
    }
}

pub fn convolve_fft(plane: &Plane, kernel: &DiscKernel) -> Plane {
    let k = kernel.half;
    // circular convolution of this size has no wrap-around inside the canvas
    let pw = (plane.width + k).next_power_of_two();
    let ph = (plane.height + k).next_power_of_two();
    let zero = Complex::new(0.0, 0.0);

    let mut img = vec![zero; pw * ph];
    for y in 0..plane.height {
        for x in 0..plane.width {
            img[y * pw + x] = Complex::new(plane.get(x, y), 0.0);
        }
    }
    let mut ker = vec![zero; pw * ph];
    let side = kernel.side();
    for j in 0..side {
        let dy = j as i64 - k as i64;
        let py = dy.rem_euclid(ph as i64) as usize;
        for i in 0..side {
            let dx = i as i64 - k as i64;
            let px = dx.rem_euclid(pw as i64) as usize;
            ker[py * pw + px] += Complex::new(kernel.weights[j * side + i], 0.0);
        }
    }

    let mut planner = FftPlanner::new();
    fft_2d(&mut img, pw, ph, &mut planner, false);
    fft_2d(&mut ker, pw, ph, &mut planner, false);
    for (a, b) in img.iter_mut().zip(&ker) {
        *a *= *b;
    }
    fft_2d(&mut img, pw, ph, &mut planner, true);
    let scale = 1.0 / (pw * ph) as f64;
    Plane::from_fn(plane.width, plane.height, |x, y| img[y * pw + x].re * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Midpoint-rule area estimate on an n×n sub-grid.
    fn brute_overlap(x0: f64, x1: f64, y0: f64, y1: f64, r: f64, n: usize) -> f64 {
        let (dx, dy) = ((x1 - x0) / n as f64, (y1 - y0) / n as f64);
        let mut count = 0usize;
        for j in 0..n {
            for i in 0..n {
                let x = x0 + (i as f64 + 0.5) * dx;
                let y = y0 + (j as f64 + 0.5) * dy;
                if x * x + y * y <= r * r {
                    count += 1;
                }
            }
        }
        count as f64 * dx * dy
    }

    #[test]
    fn overlap_matches_brute_force() {
        let cases = [
            (-0.5, 0.5, -0.5, 0.5, 0.8),
            (0.5, 1.5, -0.5, 0.5, 1.3),
            (1.5, 2.5, 1.5, 2.5, 2.9),
            (-2.5, -1.5, 0.5, 1.5, 2.2),
            (-10.0, 10.0, -10.0, 10.0, 3.0),
        ];
        for (x0, x1, y0, y1, r) in cases {
            let exact = disc_rect_overlap(x0, x1, y0, y1, r);
            let brute = brute_overlap(x0, x1, y0, y1, r, 2000);
            assert!((exact - brute).abs() < 2e-3 * (x1 - x0) * (y1 - y0), "{exact} vs {brute}");
        }
        assert!((disc_rect_overlap(-5.0, 5.0, -5.0, 5.0, 2.0) - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn kernel_is_normalized_and_symmetric() {
        for r in [0.7, 1.0, 2.5, 6.3] {
            let k = DiscKernel::new(r, 100);
            let s: f64 = k.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "r={r}: {s}");
            let n = k.weights.len();
            for i in 0..n {
                assert!((k.weights[i] - k.weights[n - 1 - i]).abs() < 1e-15);
            }
        }
        assert!(DiscKernel::new(0.0, 10).is_identity());
        assert!(DiscKernel::new(0.5, 10).is_identity());
        assert_eq!(DiscKernel::new(0.51, 10).half, 1);
    }

    #[test]
    fn fft_and_direct_agree() {
        let plane = Plane::from_fn(23, 17, |x, y| ((x * 7 + y * 13) % 11) as f64 / 10.0);
        let kernel = DiscKernel::new(4.2, 22);
        let a = convolve_direct(&plane, &kernel);
        let b = convolve_fft(&plane, &kernel);
        for (u, v) in a.data.iter().zip(&b.data) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_energy_is_conserved() {
        let mut plane = Plane::zeros(64, 64);
        for y in 28..36 {
            for x in 28..36 {
                plane.data[y * 64 + x] = 1.0;
            }
        }
        for r in [1.5, 7.0, 15.0] {
            let blurred = disc_blur(&plane, r);
            assert!((blurred.sum() - plane.sum()).abs() < 1e-9 * plane.sum(), "r={r}");
        }
    }
}
