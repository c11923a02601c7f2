//! Orthonormal symlet-6 wavelet transform with periodic boundary handling.
//!
//! The scaling filter is the standard length-6 symlet (three vanishing
//! moments), stored as literal constants. Analysis correlates the signal with
//! the filter pair at even shifts; synthesis is the exact transpose, so the
//! transform is orthonormal for every even signal length and the inverse
//! equals the adjoint.

/// Length-6 symlet scaling filter, normalized so the entries sum to sqrt(2)
/// and have unit energy.
pub const SYMLET6_LO: [f64; 6] = [
    0.33267055295008262,
    0.80689150931109258,
    0.45987750211849157,
    -0.13501102001025459,
    -0.08544127388202666,
    0.03522629188570954,
];

/// Quadrature-mirror wavelet filter: alternating-sign reversal of the
/// scaling filter.
pub fn wavelet_filter(lo: &[f64; 6]) -> [f64; 6] {
    let mut hi = [0.0; 6];
    for (k, h) in hi.iter_mut().enumerate() {
        *h = if k % 2 == 0 { lo[5 - k] } else { -lo[5 - k] };
    }
    hi
}

/// Verify the defining filter-bank identities: unit energy, sum sqrt(2),
/// orthogonality to even shifts, and a vanishing moment for the wavelet.
/// Returns the worst residual; anything above 1e-10 means the constants are
/// corrupted.
pub fn filter_bank_residual(lo: &[f64; 6]) -> f64 {
    let mut worst = (lo.iter().map(|h| h * h).sum::<f64>() - 1.0).abs();
    worst = worst.max((lo.iter().sum::<f64>() - std::f64::consts::SQRT_2).abs());
    for shift in [2usize, 4] {
        let dot: f64 = (0..6 - shift).map(|k| lo[k] * lo[k + shift]).sum();
        worst = worst.max(dot.abs());
    }
    let hi = wavelet_filter(lo);
    worst = worst.max(hi.iter().sum::<f64>().abs());
    worst
}

/// One analysis level on a length-`n` periodic signal (`n` even):
/// `approx[j] = sum_k lo[k] s[(2j+k) mod n]`, same with the wavelet filter
/// for the detail half.
fn analyze_1d(signal: &[f64], lo: &[f64; 6], hi: &[f64; 6], approx: &mut [f64], detail: &mut [f64]) {
    let n = signal.len();
    debug_assert_eq!(n % 2, 0);
    for j in 0..n / 2 {
        let mut a = 0.0;
        let mut d = 0.0;
        for k in 0..6 {
            let s = signal[(2 * j + k) % n];
            a += lo[k] * s;
            d += hi[k] * s;
        }
        approx[j] = a;
        detail[j] = d;
    }
}

/// Transpose of [`analyze_1d`]: scatter each coefficient back through its
/// filter taps. Because analysis is orthonormal this is also the inverse.
fn synthesize_1d(approx: &[f64], detail: &[f64], lo: &[f64; 6], hi: &[f64; 6], signal: &mut [f64]) {
    let n = signal.len();
    signal.fill(0.0);
    for j in 0..n / 2 {
        let (a, d) = (approx[j], detail[j]);
        for k in 0..6 {
            signal[(2 * j + k) % n] += lo[k] * a + hi[k] * d;
        }
    }
}

/// Multi-level separable 2-D transform in the quadrant layout: after each
/// level the low-pass block occupies the top-left quadrant of the region it
/// was computed from.
#[derive(Clone, Debug)]
pub struct Dwt2d {
    pub levels: usize,
    lo: [f64; 6],
    hi: [f64; 6],
}

/// Subband of a coefficient in the quadrant layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subband {
    /// Low-pass block at the coarsest level.
    Approx,
    /// Detail block at `level` (1 = finest) and orientation.
    Detail { level: usize, orient: Orientation },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
    Diagonal,
}

impl Dwt2d {
    pub fn new(levels: usize) -> Self {
        Self {
            levels,
            lo: SYMLET6_LO,
            hi: wavelet_filter(&SYMLET6_LO),
        }
    }

    /// Swap in a custom scaling filter (used by the validation suite to
    /// demonstrate that a perturbed filter is caught).
    pub fn with_filter(levels: usize, lo: [f64; 6]) -> Self {
        Self {
            levels,
            lo,
            hi: wavelet_filter(&lo),
        }
    }

    pub fn check_sizes(&self, width: usize, height: usize) -> bool {
        let d = 1usize << self.levels;
        width % d == 0 && height % d == 0 && width >= d && height >= d
    }

    /// Forward transform of a row-major `height x width` image into the
    /// quadrant coefficient layout (same size).
    pub fn forward(&self, data: &[f64], width: usize, height: usize) -> Vec<f64> {
        assert!(self.check_sizes(width, height), "image size not divisible by 2^levels");
        assert_eq!(data.len(), width * height);
        let mut coeffs = data.to_vec();
        let mut w = width;
        let mut h = height;
        let mut row = vec![0.0; width.max(height)];
        let mut approx = vec![0.0; width.max(height) / 2];
        let mut detail = vec![0.0; width.max(height) / 2];
        for _ in 0..self.levels {
            // rows of the current low-pass block
            for r in 0..h {
                row[..w].copy_from_slice(&coeffs_row(&coeffs, width, r, w));
                analyze_1d(&row[..w], &self.lo, &self.hi, &mut approx[..w / 2], &mut detail[..w / 2]);
                for c in 0..w / 2 {
                    coeffs[r * width + c] = approx[c];
                    coeffs[r * width + w / 2 + c] = detail[c];
                }
            }
            // columns
            for c in 0..w {
                for r in 0..h {
                    row[r] = coeffs[r * width + c];
                }
                analyze_1d(&row[..h], &self.lo, &self.hi, &mut approx[..h / 2], &mut detail[..h / 2]);
                for r in 0..h / 2 {
                    coeffs[r * width + c] = approx[r];
                    coeffs[(h / 2 + r) * width + c] = detail[r];
                }
            }
            w /= 2;
            h /= 2;
        }
        coeffs
    }

    /// Inverse (= adjoint) transform back to image samples.
    pub fn inverse(&self, coeffs: &[f64], width: usize, height: usize) -> Vec<f64> {
        assert!(self.check_sizes(width, height), "image size not divisible by 2^levels");
        assert_eq!(coeffs.len(), width * height);
        let mut data = coeffs.to_vec();
        let mut col = vec![0.0; width.max(height)];
        let mut approx = vec![0.0; width.max(height) / 2];
        let mut detail = vec![0.0; width.max(height) / 2];
        for level in (0..self.levels).rev() {
            let w = width >> level;
            let h = height >> level;
            // columns first (reverse of the forward order)
            for c in 0..w {
                for r in 0..h / 2 {
                    approx[r] = data[r * width + c];
                    detail[r] = data[(h / 2 + r) * width + c];
                }
                synthesize_1d(&approx[..h / 2], &detail[..h / 2], &self.lo, &self.hi, &mut col[..h]);
                for r in 0..h {
                    data[r * width + c] = col[r];
                }
            }
            // rows
            for r in 0..h {
                for c in 0..w / 2 {
                    approx[c] = data[r * width + c];
                    detail[c] = data[r * width + w / 2 + c];
                }
                synthesize_1d(&approx[..w / 2], &detail[..w / 2], &self.lo, &self.hi, &mut col[..w]);
                data[r * width..r * width + w].copy_from_slice(&col[..w]);
            }
        }
        data
    }

    /// Subband of each coefficient index in the quadrant layout.
    pub fn subband_map(&self, width: usize, height: usize) -> Vec<Subband> {
        let mut map = vec![Subband::Approx; width * height];
        for level in 1..=self.levels {
            let w = width >> (level - 1);
            let h = height >> (level - 1);
            for r in 0..h {
                for c in 0..w {
                    let in_left = c < w / 2;
                    let in_top = r < h / 2;
                    let band = match (in_top, in_left) {
                        (true, true) => continue, // refined at the next level
                        (true, false) => Orientation::Horizontal,
                        (false, true) => Orientation::Vertical,
                        (false, false) => Orientation::Diagonal,
                    };
                    map[r * width + c] = Subband::Detail { level, orient: band };
                }
            }
        }
        map
    }
}

fn coeffs_row(coeffs: &[f64], stride: usize, r: usize, w: usize) -> Vec<f64> {
    coeffs[r * stride..r * stride + w].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::{dist, norm};

    fn lcg_image(n: usize, seed: u64) -> Vec<f64> {
        let mut state = seed;
        (0..n)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 * 255.0
            })
            .collect()
    }

    #[test]
    fn filter_constants_are_orthonormal() {
        assert!(filter_bank_residual(&SYMLET6_LO) < 1e-12);
    }

    #[test]
    fn perturbed_filter_is_caught() {
        let mut bad = SYMLET6_LO;
        bad[2] += 1e-4;
        assert!(filter_bank_residual(&bad) > 1e-6);
    }

    #[test]
    fn round_trip_is_identity() {
        let dwt = Dwt2d::new(3);
        let img = lcg_image(64 * 32, 7);
        let co = dwt.forward(&img, 64, 32);
        let back = dwt.inverse(&co, 64, 32);
        assert!(dist(&img, &back) < 1e-10 * norm(&img).max(1.0));
    }

    #[test]
    fn transform_is_an_isometry() {
        let dwt = Dwt2d::new(2);
        let img = lcg_image(16 * 16, 3);
        let co = dwt.forward(&img, 16, 16);
        assert!((norm(&co) - norm(&img)).abs() < 1e-10 * norm(&img));
    }

    #[test]
    fn constant_image_has_no_detail() {
        let dwt = Dwt2d::new(3);
        let img = vec![37.5; 64 * 64];
        let co = dwt.forward(&img, 64, 64);
        let map = dwt.subband_map(64, 64);
        for (v, band) in co.iter().zip(&map) {
            if matches!(band, Subband::Detail { .. }) {
                assert!(v.abs() < 1e-10, "detail leak {v}");
            }
        }
    }

    #[test]
    fn adjointness_probe() {
        let dwt = Dwt2d::new(2);
        let x = lcg_image(32 * 32, 11);
        let y = lcg_image(32 * 32, 13);
        let fx = dwt.forward(&x, 32, 32);
        let fty = dwt.inverse(&y, 32, 32);
        let lhs: f64 = fx.iter().zip(&y).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.iter().zip(&fty).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() <= 1e-10 * norm(&x) * norm(&y));
    }

    #[test]
    fn subband_map_counts() {
        let dwt = Dwt2d::new(2);
        let map = dwt.subband_map(8, 8);
        let approx = map.iter().filter(|s| matches!(s, Subband::Approx)).count();
        assert_eq!(approx, 4); // 2x2 at level 2
        let l1 = map
            .iter()
            .filter(|s| matches!(s, Subband::Detail { level: 1, .. }))
            .count();
        assert_eq!(l1, 48); // three 4x4 blocks
    }

    #[test]
    fn rejects_indivisible_sizes() {
        let dwt = Dwt2d::new(3);
        assert!(!dwt.check_sizes(60, 64));
        assert!(dwt.check_sizes(64, 64));
    }
}
