//! Blur and frame operators, the frame-domain box constraint, degradation
//! simulation, operator-norm estimation, and SNR.
//!
//! Everything is periodic: the uniform blur wraps around the image borders
//! and the wavelet filters are periodized. This keeps the blur norm exactly 1,
//! keeps the blur nonnegative (so the box `[0,255]^N` maps into itself), and
//! makes every adjoint exact. Convolutions are direct (no FFT) so results are
//! bit-deterministic.

pub mod pgm;
pub mod wavelet;

use crate::ops::Constraint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use thiserror::Error;
use wavelet::Dwt2d;
pub use wavelet::{Orientation, Subband};

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("kernel size must be odd and positive, got {0}")]
    EvenKernel(usize),
    #[error("image is {width}x{height}, not divisible by 2^{levels}")]
    BadDecompositionSize {
        width: usize,
        height: usize,
        levels: usize,
    },
    #[error("image contains a negative sample at pixel {index}: {value}")]
    NegativeSample { index: usize, value: f64 },
    #[error("SNR reference image is identically zero")]
    ZeroReference,
    #[error("observation is identically zero")]
    ZeroObservation,
}

/// Row-major grayscale image.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageGrid {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl ImageGrid {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height, "sample count mismatch");
        Self {
            width,
            height,
            data,
        }
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Self {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Synthetic piecewise-smooth test scene: a gentle illumination ramp, a
    /// bright disk, a dark block and a thin bar. Integer-valued in [0, 255].
    pub fn phantom(width: usize, height: usize) -> Self {
        let mut data = vec![0.0; width * height];
        let (w, h) = (width as f64, height as f64);
        let (cw, ch) = (w * 0.38, h * 0.42);
        let radius = w.min(h) * 0.22;
        for r in 0..height {
            for c in 0..width {
                let (x, y) = (c as f64 + 0.5, r as f64 + 0.5);
                // smooth background ramp, roughly 60..170
                let mut v = 60.0 + 70.0 * (x / w) + 40.0 * (y / h);
                let (dx, dy) = (x - cw, y - ch);
                if (dx * dx + dy * dy).sqrt() < radius {
                    v = 235.0;
                }
                // dark block lower right
                if x > w * 0.62 && x < w * 0.92 && y > h * 0.66 && y < h * 0.88 {
                    v = 25.0;
                }
                // thin bright bar
                if y > h * 0.12 && y < h * 0.18 && x > w * 0.55 && x < w * 0.95 {
                    v = 210.0;
                }
                data[r * width + c] = v.round().clamp(0.0, 255.0);
            }
        }
        Self::new(width, height, data)
    }

    /// Plain checkerboard with the given tile size and two levels.
    pub fn checkerboard(width: usize, height: usize, tile: usize, lo: f64, hi: f64) -> Self {
        let mut data = vec![0.0; width * height];
        for r in 0..height {
            for c in 0..width {
                data[r * width + c] = if ((r / tile) + (c / tile)) % 2 == 0 { lo } else { hi };
            }
        }
        Self::new(width, height, data)
    }
}

/// Uniform `q x q` convolutive blur with periodic boundary. Self-adjoint:
/// the kernel is symmetric, so correlation equals convolution.
#[derive(Clone, Copy, Debug)]
pub struct BlurOp {
    pub q: usize,
}

impl BlurOp {
    pub fn new(q: usize) -> Result<Self, ImagingError> {
        if q == 0 || q % 2 == 0 {
            return Err(ImagingError::EvenKernel(q));
        }
        Ok(Self { q })
    }

    /// Apply the blur. Separable: horizontal box pass, vertical box pass,
    /// one exact division by `q*q` at the end.
    pub fn apply(&self, img: &ImageGrid) -> ImageGrid {
        let (w, h) = (img.width, img.height);
        let r = (self.q / 2) as isize;
        let mut tmp = vec![0.0; w * h];
        for row in 0..h {
            for col in 0..w {
                let mut s = 0.0;
                for dc in -r..=r {
                    let cc = (col as isize + dc).rem_euclid(w as isize) as usize;
                    s += img.data[row * w + cc];
                }
                tmp[row * w + col] = s;
            }
        }
        let mut out = vec![0.0; w * h];
        let denom = (self.q * self.q) as f64;
        for row in 0..h {
            for col in 0..w {
                let mut s = 0.0;
                for dr in -r..=r {
                    let rr = (row as isize + dr).rem_euclid(h as isize) as usize;
                    s += tmp[rr * w + col];
                }
                out[row * w + col] = s / denom;
            }
        }
        ImageGrid::new(w, h, out)
    }

    /// Adjoint of the blur; equal to `apply` for this symmetric kernel.
    pub fn adjoint(&self, img: &ImageGrid) -> ImageGrid {
        self.apply(img)
    }
}

/// Frame flavor used to represent the image.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameKind {
    /// Orthonormal symlet-6 wavelet basis (`nu = 1`, `K = N`).
    OrthonormalSymlet6,
    /// Concatenation of the symlet-6 basis and the same basis applied to the
    /// one-pixel cyclic shift of the image (`nu = 2`, `K = 2N`).
    TwoBasisTight,
}

/// Tight frame analysis/synthesis pair: `synthesis(analysis(y)) = nu * y`.
#[derive(Clone, Debug)]
pub struct FrameOp {
    pub kind: FrameKind,
    pub levels: usize,
    dwt: Dwt2d,
    width: usize,
    height: usize,
}

impl FrameOp {
    pub fn new(
        kind: FrameKind,
        levels: usize,
        width: usize,
        height: usize,
    ) -> Result<Self, ImagingError> {
        let dwt = Dwt2d::new(levels);
        if !dwt.check_sizes(width, height) {
            return Err(ImagingError::BadDecompositionSize {
                width,
                height,
                levels,
            });
        }
        Ok(Self {
            kind,
            levels,
            dwt,
            width,
            height,
        })
    }

    pub fn nu(&self) -> f64 {
        match self.kind {
            FrameKind::OrthonormalSymlet6 => 1.0,
            FrameKind::TwoBasisTight => 2.0,
        }
    }

    /// Coefficient count `K = nu * N`.
    pub fn coeff_len(&self) -> usize {
        self.width * self.height * self.nu() as usize
    }

    pub fn image_len(&self) -> usize {
        self.width * self.height
    }

    pub fn image_size(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    fn shift(&self, data: &[f64]) -> Vec<f64> {
        // one-pixel cyclic shift in both directions
        let (w, h) = (self.width, self.height);
        let mut out = vec![0.0; w * h];
        for r in 0..h {
            for c in 0..w {
                out[r * w + c] = data[((r + 1) % h) * w + (c + 1) % w];
            }
        }
        out
    }

    fn unshift(&self, data: &[f64]) -> Vec<f64> {
        let (w, h) = (self.width, self.height);
        let mut out = vec![0.0; w * h];
        for r in 0..h {
            for c in 0..w {
                out[((r + 1) % h) * w + (c + 1) % w] = data[r * w + c];
            }
        }
        out
    }

    /// Analysis `F: image -> coefficients`.
    pub fn analysis(&self, img: &ImageGrid) -> Vec<f64> {
        assert_eq!(img.len(), self.image_len(), "image size mismatch");
        match self.kind {
            FrameKind::OrthonormalSymlet6 => self.dwt.forward(&img.data, self.width, self.height),
            FrameKind::TwoBasisTight => {
                let mut first = self.dwt.forward(&img.data, self.width, self.height);
                let shifted = self.shift(&img.data);
                let second = self.dwt.forward(&shifted, self.width, self.height);
                first.extend(second);
                first
            }
        }
    }

    /// Synthesis `F*: coefficients -> image`; the adjoint of `analysis`.
    pub fn synthesis(&self, coeffs: &[f64]) -> ImageGrid {
        assert_eq!(coeffs.len(), self.coeff_len(), "coefficient count mismatch");
        let n = self.image_len();
        let data = match self.kind {
            FrameKind::OrthonormalSymlet6 => self.dwt.inverse(coeffs, self.width, self.height),
            FrameKind::TwoBasisTight => {
                let a = self.dwt.inverse(&coeffs[..n], self.width, self.height);
                let b = self.dwt.inverse(&coeffs[n..], self.width, self.height);
                let b = self.unshift(&b);
                a.iter().zip(&b).map(|(x, y)| x + y).collect()
            }
        };
        ImageGrid::new(self.width, self.height, data)
    }

    /// Subband of each coefficient (repeated for the shifted copy of the
    /// two-basis frame).
    pub fn subband_map(&self) -> Vec<Subband> {
        let one = self.dwt.subband_map(self.width, self.height);
        match self.kind {
            FrameKind::OrthonormalSymlet6 => one,
            FrameKind::TwoBasisTight => {
                let mut both = one.clone();
                both.extend(one);
                both
            }
        }
    }
}

/// Constraint `C = { x : F* x in [lo, hi]^N }` with its exact projection
/// `P_C(x) = x + nu^-1 F (clamp(F* x) - F* x)`.
#[derive(Clone, Debug)]
pub struct FrameBoxConstraint {
    pub frame: FrameOp,
    pub lo: f64,
    pub hi: f64,
}

impl FrameBoxConstraint {
    pub fn new(frame: FrameOp, lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty pixel box");
        Self { frame, lo, hi }
    }

    /// The image-domain box `[0, 255]^N`.
    pub fn pixel_range(frame: FrameOp) -> Self {
        Self::new(frame, 0.0, 255.0)
    }

    pub fn project_coeffs(&self, x: &[f64]) -> Vec<f64> {
        let nu = self.frame.nu();
        let synth = self.frame.synthesis(x);
        let clamped: Vec<f64> = synth
            .data
            .iter()
            .map(|&v| v.max(self.lo).min(self.hi))
            .collect();
        let diff: Vec<f64> = clamped.iter().zip(&synth.data).map(|(c, s)| c - s).collect();
        if diff.iter().all(|&d| d == 0.0) {
            return x.to_vec(); // already feasible, bit-identical
        }
        let img = ImageGrid::new(self.frame.width, self.frame.height, diff);
        let lifted = self.frame.analysis(&img);
        x.iter().zip(&lifted).map(|(xi, li)| xi + li / nu).collect()
    }
}

impl Constraint for FrameBoxConstraint {
    fn project(&self, x: &[f64]) -> Vec<f64> {
        self.project_coeffs(x)
    }
}

/// Power-iteration estimate of the operator norm of `forward` (largest
/// singular value), via the symmetric composition `adjoint(forward(.))`.
/// Deterministic for a fixed seed; returns 0 for the zero operator.
pub fn opnorm_estimate(
    forward: impl Fn(&[f64]) -> Vec<f64>,
    adjoint: impl Fn(&[f64]) -> Vec<f64>,
    dim: usize,
    iters: usize,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
    let mut lambda = 0.0_f64;
    for _ in 0..iters {
        let av = adjoint(&forward(&v));
        let norm = crate::util::norm(&av);
        if norm == 0.0 {
            return 0.0;
        }
        lambda = crate::util::dot(&av, &v) / crate::util::dot(&v, &v);
        v = av.iter().map(|x| x / norm).collect();
    }
    lambda.max(0.0).sqrt()
}

/// Noise flavor of the degradation model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseKind {
    /// Additive zero-mean Gaussian whose per-pixel variance is `u/(2*alpha)`.
    SignalDepGaussian,
    /// Counts `z ~ Poisson(alpha * u)`.
    Poisson,
}

impl NoiseKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "gaussian" | "signal-dep-gaussian" => Some(NoiseKind::SignalDepGaussian),
            "poisson" => Some(NoiseKind::Poisson),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::SignalDepGaussian => "gaussian",
            NoiseKind::Poisson => "poisson",
        }
    }
}

/// Simulate the degradation `blur then noise` deterministically for a seed.
/// Returns the noisy observation; the blurred intermediate is `blur.apply`.
pub fn degrade(
    img: &ImageGrid,
    blur: &BlurOp,
    kind: NoiseKind,
    alpha: &[f64],
    seed: u64,
) -> Result<ImageGrid, ImagingError> {
    if let Some((i, &v)) = img.data.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(ImagingError::NegativeSample { index: i, value: v });
    }
    assert_eq!(alpha.len(), img.len(), "alpha must be per-pixel");
    let blurred = blur.apply(img);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut z = Vec::with_capacity(blurred.len());
    match kind {
        NoiseKind::SignalDepGaussian => {
            for (i, &u) in blurred.data.iter().enumerate() {
                let sigma = (u.max(0.0) / (2.0 * alpha[i])).sqrt();
                let g: f64 = StandardNormal.sample(&mut rng);
                z.push(u + sigma * g);
            }
        }
        NoiseKind::Poisson => {
            for (i, &u) in blurred.data.iter().enumerate() {
                let lambda = alpha[i] * u.max(0.0);
                if lambda == 0.0 {
                    z.push(0.0);
                } else {
                    let pois = Poisson::new(lambda).expect("positive rate");
                    z.push(pois.sample(&mut rng));
                }
            }
        }
    }
    Ok(ImageGrid::new(img.width, img.height, z))
}

/// Signal-to-noise ratio `20 log10(||yref|| / ||y - yref||)` in dB. Equal
/// images return `+inf`.
pub fn snr(y: &ImageGrid, yref: &ImageGrid) -> Result<f64, ImagingError> {
    assert_eq!(y.len(), yref.len(), "image size mismatch");
    let nref = crate::util::norm(&yref.data);
    if nref == 0.0 {
        return Err(ImagingError::ZeroReference);
    }
    let err = crate::util::dist(&y.data, &yref.data);
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * (nref / err).log10())
}
