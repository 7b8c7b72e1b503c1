/// A single-channel image plane of `f64` samples, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// 180° rotation about the plane center.
    pub fn rotated_180(&self) -> Plane {
        let mut data = self.data.clone();
        data.reverse();
        Plane {
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// Bilinear resampling about the plane center by `ratio > 0`, keeping the
    /// canvas size. Samples falling outside the source are zero.
    pub fn scaled_about_center(&self, ratio: f64) -> Plane {
        assert!(ratio > 0.0, "scale ratio must be positive");
        if ratio == 1.0 {
            return self.clone();
        }
        let cx = self.width as f64 / 2.0;
        let cy = self.height as f64 / 2.0;
        Plane::from_fn(self.width, self.height, |x, y| {
            let sx = (x as f64 + 0.5 - cx) / ratio + cx - 0.5;
            let sy = (y as f64 + 0.5 - cy) / ratio + cy - 0.5;
            self.bilinear(sx, sy)
        })
    }

    fn sample_or_zero(&self, x: i64, y: i64) -> f64 {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            0.0
        } else {
            self.get(x as usize, y as usize)
        }
    }

    /// Bilinear interpolation at pixel-index coordinates (pixel centers at
    /// integers), zero outside.
    pub fn bilinear(&self, x: f64, y: f64) -> f64 {
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let (ix, iy) = (x0 as i64, y0 as i64);
        let top = self.sample_or_zero(ix, iy) * (1.0 - fx) + self.sample_or_zero(ix + 1, iy) * fx;
        let bottom =
            self.sample_or_zero(ix, iy + 1) * (1.0 - fx) + self.sample_or_zero(ix + 1, iy + 1) * fx;
        top * (1.0 - fy) + bottom * fy
    }

    pub fn clamp_unit(&mut self) {
        for v in &mut self.data {
            *v = v.clamp(0.0, 1.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_an_involution() {
        let p = Plane::from_fn(3, 2, |x, y| (x + 10 * y) as f64);
        let r = p.rotated_180();
        assert_eq!(r.get(0, 0), p.get(2, 1));
        assert_eq!(r.rotated_180(), p);
    }

    #[test]
    fn half_scale_samples_toward_center() {
        let p = Plane::from_fn(4, 4, |x, _| x as f64);
        let s = p.scaled_about_center(0.5);
        // output x=1 sits 0.5 px left of center and reads source index 0.5
        assert!((s.get(1, 1) - 0.5).abs() < 1e-15);
        assert!((s.get(2, 1) - 2.5).abs() < 1e-15);
        // output x=0 reads source index -1.5 → outside half weighted with zeros
        assert!((s.get(0, 1) - 0.0).abs() < 1e-15);
        let id = p.scaled_about_center(1.0);
        assert_eq!(id, p);
    }

    #[test]
    fn bilinear_interpolates_between_centers() {
        let p = Plane::from_fn(2, 1, |x, _| x as f64 * 2.0);
        assert!((p.bilinear(0.25, 0.0) - 0.5).abs() < 1e-15);
        assert_eq!(p.bilinear(-1.0, 0.0), 0.0);
    }
}
