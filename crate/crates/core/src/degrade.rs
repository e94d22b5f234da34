//! Degradation treatments: Clean, Moderate, Heavy.
//!
//! Every transform is a pure function of (input raster, parameters,
//! seed). The parameter draw order inside [`apply_treatment_with`] and
//! the pixel/channel traversal order inside the noise and texture
//! transforms are part of the determinism contract and must not change.

use serde::{Deserialize, Serialize};

use crate::raster::Raster;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Treatment {
    Clean,
    Moderate,
    Heavy,
}

impl std::fmt::Display for Treatment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Clean => "clean",
            Self::Moderate => "moderate",
            Self::Heavy => "heavy",
        })
    }
}

impl std::str::FromStr for Treatment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "clean" => Ok(Self::Clean),
            "moderate" => Ok(Self::Moderate),
            "heavy" => Ok(Self::Heavy),
            other => Err(format!("unknown treatment {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TextureParams {
    pub cell_scale: u32,
    pub contrast: f64,
}

/// The sampled parameter set recorded in the manifest. Clean samples
/// carry the all-zero value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradeParams {
    pub noise_sigma: f64,
    pub blur_sigma: f64,
    pub color_shift: [i32; 3],
    pub texture: Option<TextureParams>,
}

impl DegradeParams {
    pub fn zero() -> Self {
        Self {
            noise_sigma: 0.0,
            blur_sigma: 0.0,
            color_shift: [0, 0, 0],
            texture: None,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.noise_sigma < 0.0 || self.blur_sigma < 0.0 {
            return Err("sigmas must be non-negative".into());
        }
        if self.color_shift.iter().any(|d| d.abs() > 32) {
            return Err("color shift limited to 32 per channel".into());
        }
        if let Some(t) = &self.texture {
            if t.cell_scale == 0 {
                return Err("texture cell scale must be positive".into());
            }
            if !(0.0..=1.0).contains(&t.contrast) {
                return Err("texture contrast must lie in [0,1]".into());
            }
        }
        Ok(())
    }
}

/// Probability mix over the three treatments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreatmentMix {
    pub clean: f64,
    pub moderate: f64,
    pub heavy: f64,
}

impl Default for TreatmentMix {
    fn default() -> Self {
        Self {
            clean: 1.0 / 3.0,
            moderate: 1.0 / 3.0,
            heavy: 1.0 / 3.0,
        }
    }
}

impl TreatmentMix {
    pub fn clean_only() -> Self {
        Self {
            clean: 1.0,
            moderate: 0.0,
            heavy: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let parts = [self.clean, self.moderate, self.heavy];
        if parts.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err("treatment weights must lie in [0,1]".into());
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(format!("treatment weights sum to {sum}, expected 1"));
        }
        Ok(())
    }

    /// Picks a treatment with one uniform draw against the cumulative
    /// weights, in the fixed order clean, moderate, heavy.
    pub fn pick(&self, rng: &mut SplitMix64) -> Treatment {
        let u = rng.next_f64();
        if u < self.clean {
            Treatment::Clean
        } else if u < self.clean + self.moderate {
            Treatment::Moderate
        } else {
            Treatment::Heavy
        }
    }
}

/// Sampling ranges for the non-Clean treatments. Defaults keep
/// Moderate legible and make Heavy visibly hostile; all are
/// config-overridable, and the sampled values land in the manifest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DegradeRanges {
    pub moderate_noise_sigma: (f64, f64),
    pub moderate_blur_sigma: (f64, f64),
    pub moderate_color_shift: (i32, i32),
    pub heavy_cell_scale: (u32, u32),
    pub heavy_contrast: (f64, f64),
    pub heavy_blur_sigma: (f64, f64),
    pub heavy_noise_sigma: (f64, f64),
}

impl Default for DegradeRanges {
    fn default() -> Self {
        Self {
            moderate_noise_sigma: (3.0, 8.0),
            moderate_blur_sigma: (0.5, 1.0),
            moderate_color_shift: (-10, 10),
            heavy_cell_scale: (24, 64),
            heavy_contrast: (0.15, 0.35),
            heavy_blur_sigma: (1.5, 3.0),
            heavy_noise_sigma: (8.0, 20.0),
        }
    }
}

impl DegradeRanges {
    pub fn validate(&self) -> Result<(), String> {
        fn ordered(name: &str, (lo, hi): (f64, f64), floor: f64) -> Result<(), String> {
            if lo < floor || hi < lo {
                return Err(format!("{name} range ({lo}, {hi}) is invalid"));
            }
            Ok(())
        }
        ordered("moderate_noise_sigma", self.moderate_noise_sigma, 0.0)?;
        ordered("moderate_blur_sigma", self.moderate_blur_sigma, 0.0)?;
        ordered("heavy_contrast", self.heavy_contrast, 0.0)?;
        ordered("heavy_blur_sigma", self.heavy_blur_sigma, 0.0)?;
        ordered("heavy_noise_sigma", self.heavy_noise_sigma, 0.0)?;
        if self.heavy_contrast.1 > 1.0 {
            return Err("heavy_contrast must stay within [0,1]".into());
        }
        let (lo, hi) = self.moderate_color_shift;
        if lo > hi || lo < -32 || hi > 32 {
            return Err(format!("moderate_color_shift range ({lo}, {hi}) is invalid"));
        }
        let (lo, hi) = self.heavy_cell_scale;
        if lo == 0 || lo > hi {
            return Err(format!("heavy_cell_scale range ({lo}, {hi}) is invalid"));
        }
        Ok(())
    }
}

/// Adds independent zero-mean Gaussian perturbation per channel,
/// saturating to [0,255]. Pixels are visited row-major, channels R, G,
/// B; each draw consumes exactly two raw generator outputs.
pub fn gaussian_noise(r: &Raster, sigma: f64, rng: &mut SplitMix64) -> Raster {
    assert!(sigma >= 0.0, "noise sigma must be non-negative");
    if sigma == 0.0 {
        return r.clone();
    }
    let mut out = r.clone();
    for byte in out.data_mut() {
        let perturbed = *byte as f64 + sigma * rng.next_gaussian();
        *byte = perturbed.round().clamp(0.0, 255.0) as u8;
    }
    out
}

fn blur_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    let mut weights: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    weights
}

/// Separable Gaussian blur, kernel radius ceil(3*sigma), clamp-to-edge.
/// The intermediate stays in floating point; rounding happens once at
/// the end.
pub fn gaussian_blur(r: &Raster, sigma: f64) -> Raster {
    assert!(sigma >= 0.0, "blur sigma must be non-negative");
    if sigma == 0.0 {
        return r.clone();
    }
    let kernel = blur_kernel(sigma);
    let radius = (kernel.len() / 2) as i64;
    let (w, h) = (r.width() as i64, r.height() as i64);

    let mut horizontal = vec![0.0f64; (w * h) as usize * 3];
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0f64; 3];
            for (k, weight) in kernel.iter().enumerate() {
                let sx = (x + k as i64 - radius).clamp(0, w - 1);
                let px = r.get(sx as u32, y as u32);
                for c in 0..3 {
                    acc[c] += weight * px[c] as f64;
                }
            }
            let o = ((y * w + x) * 3) as usize;
            horizontal[o..o + 3].copy_from_slice(&acc);
        }
    }

    let mut out = r.clone();
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0f64; 3];
            for (k, weight) in kernel.iter().enumerate() {
                let sy = (y + k as i64 - radius).clamp(0, h - 1);
                let o = ((sy * w + x) * 3) as usize;
                for c in 0..3 {
                    acc[c] += weight * horizontal[o + c];
                }
            }
            out.set(
                x as u32,
                y as u32,
                [
                    acc[0].round().clamp(0.0, 255.0) as u8,
                    acc[1].round().clamp(0.0, 255.0) as u8,
                    acc[2].round().clamp(0.0, 255.0) as u8,
                ],
            );
        }
    }
    out
}

/// Saturating per-channel addition.
pub fn color_shift(r: &Raster, deltas: [i32; 3]) -> Raster {
    assert!(
        deltas.iter().all(|d| d.abs() <= 32),
        "color shift limited to 32 per channel"
    );
    let mut out = r.clone();
    for (i, byte) in out.data_mut().iter_mut().enumerate() {
        let shifted = *byte as i32 + deltas[i % 3];
        *byte = shifted.clamp(0, 255) as u8;
    }
    out
}

/// Multiplies the raster by a procedural paper texture. The texture is
/// value noise: one uniform draw per grid node (row-major), smoothstep
/// bilinear interpolation between nodes, scaled to
/// `255 * (1 - contrast * v)`. Dark ink survives, white becomes paper.
pub fn texture_background(r: &Raster, rng: &mut SplitMix64, params: &TextureParams) -> Raster {
    assert!(params.cell_scale > 0, "texture cell scale must be positive");
    assert!(
        (0.0..=1.0).contains(&params.contrast),
        "texture contrast must lie in [0,1]"
    );
    let cell = params.cell_scale as f64;
    let (w, h) = (r.width(), r.height());
    let gw = (w as usize).div_ceil(params.cell_scale as usize) + 1;
    let gh = (h as usize).div_ceil(params.cell_scale as usize) + 1;
    let grid: Vec<f64> = (0..gw * gh).map(|_| rng.next_f64()).collect();

    fn smoothstep(t: f64) -> f64 {
        t * t * (3.0 - 2.0 * t)
    }

    let mut out = r.clone();
    for y in 0..h {
        let gy = (y as f64 / cell) as usize;
        let fy = smoothstep(y as f64 / cell - gy as f64);
        for x in 0..w {
            let gx = (x as f64 / cell) as usize;
            let fx = smoothstep(x as f64 / cell - gx as f64);
            let v00 = grid[gy * gw + gx];
            let v10 = grid[gy * gw + gx + 1];
            let v01 = grid[(gy + 1) * gw + gx];
            let v11 = grid[(gy + 1) * gw + gx + 1];
            let v = v00 * (1.0 - fx) * (1.0 - fy)
                + v10 * fx * (1.0 - fy)
                + v01 * (1.0 - fx) * fy
                + v11 * fx * fy;
            let t = 255.0 * (1.0 - params.contrast * v);
            let px = r.get(x, y);
            out.set(
                x,
                y,
                [
                    (px[0] as f64 / 255.0 * t).round() as u8,
                    (px[1] as f64 / 255.0 * t).round() as u8,
                    (px[2] as f64 / 255.0 * t).round() as u8,
                ],
            );
        }
    }
    out
}

/// Applies a treatment with the default ranges.
pub fn apply_treatment(r: &Raster, t: Treatment, rng: &mut SplitMix64) -> (Raster, DegradeParams) {
    apply_treatment_with(r, t, rng, &DegradeRanges::default())
}

/// Applies a treatment, sampling its parameters from `rng`.
///
/// Draw order is frozen: Moderate draws noise_sigma, blur_sigma, then
/// the R, G, B shifts; Heavy draws cell_scale, contrast, blur_sigma,
/// noise_sigma. Application order is color_shift -> blur -> noise for
/// Moderate and texture -> blur -> noise for Heavy.
pub fn apply_treatment_with(
    r: &Raster,
    t: Treatment,
    rng: &mut SplitMix64,
    ranges: &DegradeRanges,
) -> (Raster, DegradeParams) {
    match t {
        Treatment::Clean => (r.clone(), DegradeParams::zero()),
        Treatment::Moderate => {
            let (nlo, nhi) = ranges.moderate_noise_sigma;
            let (blo, bhi) = ranges.moderate_blur_sigma;
            let (slo, shi) = ranges.moderate_color_shift;
            let noise_sigma = rng.range_f64(nlo, nhi);
            let blur_sigma = rng.range_f64(blo, bhi);
            let shift = [
                rng.range_i32(slo, shi),
                rng.range_i32(slo, shi),
                rng.range_i32(slo, shi),
            ];
            let params = DegradeParams {
                noise_sigma,
                blur_sigma,
                color_shift: shift,
                texture: None,
            };
            let out = color_shift(r, shift);
            let out = gaussian_blur(&out, blur_sigma);
            let out = gaussian_noise(&out, noise_sigma, rng);
            (out, params)
        }
        Treatment::Heavy => {
            let (clo, chi) = ranges.heavy_cell_scale;
            let (klo, khi) = ranges.heavy_contrast;
            let (blo, bhi) = ranges.heavy_blur_sigma;
            let (nlo, nhi) = ranges.heavy_noise_sigma;
            let texture = TextureParams {
                cell_scale: rng.range_u32(clo, chi),
                contrast: rng.range_f64(klo, khi),
            };
            let blur_sigma = rng.range_f64(blo, bhi);
            let noise_sigma = rng.range_f64(nlo, nhi);
            let params = DegradeParams {
                noise_sigma,
                blur_sigma,
                color_shift: [0, 0, 0],
                texture: Some(texture),
            };
            let out = texture_background(r, rng, &texture);
            let out = gaussian_blur(&out, blur_sigma);
            let out = gaussian_noise(&out, noise_sigma, rng);
            (out, params)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mid_gray(size: u32) -> Raster {
        Raster::new(size, size, [128, 128, 128])
    }

    #[test]
    fn noise_zero_sigma_is_identity() {
        let r = mid_gray(8);
        let mut rng = SplitMix64::new(1);
        assert_eq!(gaussian_noise(&r, 0.0, &mut rng), r);
    }

    #[test]
    fn noise_is_deterministic() {
        let r = mid_gray(16);
        let a = gaussian_noise(&r, 5.0, &mut SplitMix64::new(9));
        let b = gaussian_noise(&r, 5.0, &mut SplitMix64::new(9));
        assert_eq!(a, b);
        let c = gaussian_noise(&r, 5.0, &mut SplitMix64::new(10));
        assert_ne!(a, c);
    }

    #[test]
    fn noise_preserves_mean_on_mid_gray() {
        let r = mid_gray(256);
        let out = gaussian_noise(&r, 10.0, &mut SplitMix64::new(77));
        for mean in out.mean_rgb() {
            assert!((mean - 128.0).abs() < 1.0, "channel mean {mean}");
        }
    }

    #[test]
    fn blur_zero_sigma_is_identity() {
        let r = mid_gray(8);
        assert_eq!(gaussian_blur(&r, 0.0), r);
    }

    #[test]
    fn blur_preserves_constant_rasters() {
        let r = Raster::new(20, 13, [37, 200, 5]);
        assert_eq!(gaussian_blur(&r, 2.5), r);
    }

    #[test]
    fn blur_center_weight_matches_direct_kernel_evaluation() {
        // sigma=1: radius 3, normalized center weight
        // 1 / (1 + 2(e^-0.5 + e^-2 + e^-4.5)) = 0.3990502796524549;
        // separable pass squares it: 255 * w0^2 = 40.606 -> 41.
        let mut r = Raster::new(9, 9, [0, 0, 0]);
        r.set(4, 4, [255, 255, 255]);
        let out = gaussian_blur(&r, 1.0);
        assert_eq!(out.get(4, 4), [41, 41, 41]);
    }

    #[test]
    fn blur_kernel_normalized() {
        for sigma in [0.5, 1.0, 1.7, 3.0] {
            let k = blur_kernel(sigma);
            assert_eq!(k.len() as i64, 2 * (3.0f64 * sigma).ceil() as i64 + 1);
            assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn blur_is_linear_at_low_intensity() {
        let mut r = Raster::new(12, 12, [0, 0, 0]);
        for (i, byte) in r.data_mut().iter_mut().enumerate() {
            *byte = (i % 40) as u8;
        }
        let mut doubled = r.clone();
        for byte in doubled.data_mut() {
            *byte *= 2;
        }
        let blurred_then_doubled: Vec<i32> = gaussian_blur(&r, 1.2)
            .data()
            .iter()
            .map(|b| 2 * *b as i32)
            .collect();
        let doubled_then_blurred = gaussian_blur(&doubled, 1.2);
        for (a, b) in blurred_then_doubled.iter().zip(doubled_then_blurred.data()) {
            assert!((a - *b as i32).abs() <= 1, "{a} vs {b}");
        }
    }

    #[test]
    fn shift_saturates() {
        let r = Raster::new(1, 1, [250, 10, 10]);
        let out = color_shift(&r, [10, -20, 0]);
        assert_eq!(out.get(0, 0), [255, 0, 10]);
    }

    #[test]
    fn shift_round_trips_on_interior_values() {
        let r = Raster::new(3, 3, [100, 150, 64]);
        let out = color_shift(&color_shift(&r, [13, -20, 32]), [-13, 20, -32]);
        assert_eq!(out, r);
    }

    #[test]
    fn texture_zero_contrast_is_identity() {
        let r = mid_gray(10);
        let mut rng = SplitMix64::new(3);
        let params = TextureParams {
            cell_scale: 4,
            contrast: 0.0,
        };
        assert_eq!(texture_background(&r, &mut rng, &params), r);
    }

    #[test]
    fn texture_black_absorbs() {
        let r = Raster::new(10, 10, [0, 0, 0]);
        let mut rng = SplitMix64::new(3);
        let params = TextureParams {
            cell_scale: 4,
            contrast: 0.3,
        };
        assert_eq!(texture_background(&r, &mut rng, &params), r);
    }

    #[test]
    fn texture_is_deterministic() {
        let r = Raster::new(33, 17, [255, 255, 255]);
        let params = TextureParams {
            cell_scale: 8,
            contrast: 0.3,
        };
        let a = texture_background(&r, &mut SplitMix64::new(5), &params);
        let b = texture_background(&r, &mut SplitMix64::new(5), &params);
        assert_eq!(a, b);
        assert_ne!(a, r);
    }

    #[test]
    fn clean_treatment_is_identity_with_zero_params() {
        let r = mid_gray(12);
        let (out, params) = apply_treatment(&r, Treatment::Clean, &mut SplitMix64::new(4));
        assert_eq!(out, r);
        assert_eq!(params, DegradeParams::zero());
    }

    #[test]
    fn moderate_treatment_deterministic_and_in_range() {
        let r = mid_gray(24);
        let (a, pa) = apply_treatment(&r, Treatment::Moderate, &mut SplitMix64::new(11));
        let (b, pb) = apply_treatment(&r, Treatment::Moderate, &mut SplitMix64::new(11));
        assert_eq!(a, b);
        assert_eq!(pa, pb);
        assert!((3.0..=8.0).contains(&pa.noise_sigma));
        assert!((0.5..=1.0).contains(&pa.blur_sigma));
        assert!(pa.color_shift.iter().all(|d| (-10..=10).contains(d)));
        assert!(pa.texture.is_none());
    }

    #[test]
    fn heavy_params_stay_in_range_over_many_draws() {
        let r = mid_gray(4);
        let mut rng = SplitMix64::new(99);
        for _ in 0..1000 {
            let (_, p) = apply_treatment(&r, Treatment::Heavy, &mut rng);
            let t = p.texture.expect("heavy always textures");
            assert!((24..=64).contains(&t.cell_scale));
            assert!((0.15..=0.35).contains(&t.contrast));
            assert!((1.5..=3.0).contains(&p.blur_sigma));
            assert!((8.0..=20.0).contains(&p.noise_sigma));
            assert_eq!(p.color_shift, [0, 0, 0]);
            p.validate().unwrap();
        }
    }

    #[test]
    fn severity_is_monotone_in_mean_deviation() {
        // white page with black bars stands in for rendered text
        let mut page = Raster::new(64, 64, [255, 255, 255]);
        for y in (8..60).step_by(12) {
            for x in 4..60 {
                for dy in 0..4 {
                    page.set(x, y + dy, [0, 0, 0]);
                }
            }
        }
        let (clean, _) = apply_treatment(&page, Treatment::Clean, &mut SplitMix64::new(21));
        let (moderate, _) = apply_treatment(&page, Treatment::Moderate, &mut SplitMix64::new(21));
        let (heavy, _) = apply_treatment(&page, Treatment::Heavy, &mut SplitMix64::new(21));
        let d_clean = clean.mean_abs_diff(&page);
        let d_moderate = moderate.mean_abs_diff(&page);
        let d_heavy = heavy.mean_abs_diff(&page);
        assert_eq!(d_clean, 0.0);
        assert!(d_moderate > d_clean);
        assert!(d_heavy >= d_moderate, "{d_heavy} < {d_moderate}");
    }

    #[test]
    fn transforms_preserve_dimensions() {
        let r = Raster::new(31, 7, [128, 0, 255]);
        let mut rng = SplitMix64::new(2);
        for out in [
            gaussian_noise(&r, 4.0, &mut rng),
            gaussian_blur(&r, 1.3),
            color_shift(&r, [5, -5, 0]),
            texture_background(
                &r,
                &mut rng,
                &TextureParams {
                    cell_scale: 16,
                    contrast: 0.2,
                },
            ),
        ] {
            assert_eq!((out.width(), out.height()), (r.width(), r.height()));
        }
    }

    #[test]
    fn treatment_mix_picks_degenerate() {
        let mut rng = SplitMix64::new(1);
        for _ in 0..100 {
            assert_eq!(TreatmentMix::clean_only().pick(&mut rng), Treatment::Clean);
        }
        let heavy_only = TreatmentMix {
            clean: 0.0,
            moderate: 0.0,
            heavy: 1.0,
        };
        for _ in 0..100 {
            assert_eq!(heavy_only.pick(&mut rng), Treatment::Heavy);
        }
    }

    #[test]
    fn treatment_mix_validation() {
        TreatmentMix::default().validate().unwrap();
        assert!(TreatmentMix {
            clean: 0.5,
            moderate: 0.2,
            heavy: 0.2
        }
        .validate()
        .is_err());
        assert!(TreatmentMix {
            clean: -0.1,
            moderate: 0.6,
            heavy: 0.5
        }
        .validate()
        .is_err());
    }

    #[test]
    fn degrade_ranges_validation() {
        DegradeRanges::default().validate().unwrap();
        let bad = DegradeRanges {
            moderate_color_shift: (-40, 10),
            ..DegradeRanges::default()
        };
        assert!(bad.validate().is_err());
        let bad = DegradeRanges {
            heavy_cell_scale: (0, 10),
            ..DegradeRanges::default()
        };
        assert!(bad.validate().is_err());
        let bad = DegradeRanges {
            heavy_contrast: (0.5, 1.2),
            ..DegradeRanges::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn params_serialize_shape() {
        let p = DegradeParams::zero();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(
            json,
            "{\"noise_sigma\":0.0,\"blur_sigma\":0.0,\"color_shift\":[0,0,0],\"texture\":null}"
        );
    }
}
