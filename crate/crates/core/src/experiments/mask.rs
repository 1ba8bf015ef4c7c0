use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ExperimentError;
use crate::grid::{StructuredGrid, TensorField};
use crate::tensor::{transform_partition, SymTensor, TwoPhaseCoefficients};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Phase 1, cytoplasm.
    Aqueous,
    /// Phase 2, membrane.
    Lipid,
}

/// Binary raster of phase labels.
///
/// Pixels are stored row-major with row 0 at the top of the image, so pixel
/// `(col, row)` covers the cell `(col, height − 1 − row)` of the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMask {
    width: usize,
    height: usize,
    labels: Vec<Phase>,
    pixel_size: f64,
    /// Notes gathered while reading, e.g. thresholding of grey values.
    pub warnings: Vec<String>,
}

impl PhaseMask {
    pub fn new(width: usize, height: usize, labels: Vec<Phase>, pixel_size: f64) -> Result<Self, ExperimentError> {
        if width == 0 || height == 0 {
            return Err(ExperimentError::Config("mask must not be empty".into()));
        }
        if labels.len() != width * height {
            return Err(ExperimentError::Config(format!(
                "mask has {} labels for {width}x{height} pixels",
                labels.len()
            )));
        }
        if !(pixel_size > 0.0 && pixel_size.is_finite()) {
            return Err(ExperimentError::Config("pixel size must be positive".into()));
        }
        Ok(Self { width, height, labels, pixel_size, warnings: Vec::new() })
    }

    pub fn uniform(width: usize, height: usize, phase: Phase, pixel_size: f64) -> Result<Self, ExperimentError> {
        Self::new(width, height, vec![phase; width * height], pixel_size)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_size(&self) -> f64 {
        self.pixel_size
    }

    pub fn labels(&self) -> &[Phase] {
        &self.labels
    }

    pub fn get(&self, col: usize, row: usize) -> Phase {
        self.labels[row * self.width + col]
    }

    pub fn lipid_fraction(&self) -> f64 {
        let lipid = self.labels.iter().filter(|p| **p == Phase::Lipid).count();
        lipid as f64 / self.labels.len() as f64
    }

    /// Physical size along x and y.
    pub fn extent(&self) -> (f64, f64) {
        (self.width as f64 * self.pixel_size, self.height as f64 * self.pixel_size)
    }
}

/// Synthetic membrane stack: lipid stripes normal to x.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthLayerSpec {
    /// Target lipid volume fraction `p2`, strictly between 0 and 1.
    pub lipid_fraction: f64,
    pub layers: usize,
    /// Sinusoidal lateral displacement of the stripes, as a fraction of the
    /// layer pitch.
    pub wobble: f64,
    /// Expected number of gaps ("short circuits") cut into each stripe.
    pub gap_density: f64,
    pub width: usize,
    pub height: usize,
    pub pixel_size: f64,
    pub seed: u64,
}

impl SynthLayerSpec {
    /// Perfect, gap-free stripes.
    pub fn perfect(lipid_fraction: f64, layers: usize, width: usize, height: usize, pixel_size: f64) -> Self {
        Self { lipid_fraction, layers, wobble: 0.0, gap_density: 0.0, width, height, pixel_size, seed: 0 }
    }
}

/// Rasterizes a layered membrane structure.
///
/// The lipid column count is `round(p2 · width)`, split as evenly as possible
/// over the layers and centred within each layer, so a gap-free mask realizes
/// `p2` to within half a pixel column. Wobble shifts rows cyclically and keeps
/// the per-row count; gaps remove lipid pixels.
pub fn synth_layered_mask(spec: &SynthLayerSpec) -> Result<PhaseMask, ExperimentError> {
    let p2 = spec.lipid_fraction;
    if !(p2 > 0.0 && p2 < 1.0) {
        return Err(ExperimentError::Config("lipid fraction must lie in (0, 1)".into()));
    }
    if spec.layers == 0 || spec.width == 0 || spec.height == 0 {
        return Err(ExperimentError::Config("layers and resolution must be positive".into()));
    }
    if !(spec.wobble >= 0.0 && spec.gap_density >= 0.0) {
        return Err(ExperimentError::Config("wobble and gap density must be non-negative".into()));
    }
    let width = spec.width;
    let layers = spec.layers;
    let lipid_total = (p2 * width as f64).round() as usize;
    if lipid_total < layers || width - lipid_total < layers {
        return Err(ExperimentError::Config(format!(
            "{width} columns cannot realize lipid fraction {p2} in {layers} layers"
        )));
    }

    let mut base = vec![Phase::Aqueous; width];
    let mut stripes = Vec::with_capacity(layers);
    for k in 0..layers {
        let start = k * width / layers;
        let end = (k + 1) * width / layers;
        let count = (k + 1) * lipid_total / layers - k * lipid_total / layers;
        let offset = start + (end - start - count) / 2;
        base[offset..offset + count].fill(Phase::Lipid);
        stripes.push((offset, count));
    }

    let pitch = width as f64 / layers as f64;
    let mut labels = Vec::with_capacity(width * spec.height);
    let mut shifts = Vec::with_capacity(spec.height);
    for row in 0..spec.height {
        let phase = TAU * (row as f64 + 0.5) / spec.height as f64;
        let shift = (spec.wobble * pitch * phase.sin()).round() as isize;
        shifts.push(shift);
        for col in 0..width {
            let src = (col as isize - shift).rem_euclid(width as isize) as usize;
            labels.push(base[src]);
        }
    }

    if spec.gap_density > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let gap_rows = (spec.height / 10).max(1);
        let whole = spec.gap_density.floor() as usize;
        let frac = spec.gap_density - whole as f64;
        for &(offset, count) in &stripes {
            let gaps = whole + usize::from(rng.random::<f64>() < frac);
            for _ in 0..gaps {
                let first = rng.random_range(0..spec.height);
                for row in first..(first + gap_rows).min(spec.height) {
                    for c in offset..offset + count {
                        let col = (c as isize + shifts[row]).rem_euclid(width as isize) as usize;
                        labels[row * width + col] = Phase::Aqueous;
                    }
                }
            }
        }
    }
    PhaseMask::new(width, spec.height, labels, spec.pixel_size)
}

/// One grid cell per pixel; lipid cells receive the transformed coefficients
/// `d2 / K_p` and capacity `1 / K_p`.
pub fn ingest_mask(
    mask: &PhaseMask,
    d1: &SymTensor,
    d2: &SymTensor,
    partition_coefficient: f64,
) -> Result<TensorField, ExperimentError> {
    if d1.dim() != 2 || d2.dim() != 2 {
        return Err(ExperimentError::Config("mask ingestion needs 2D tensors".into()));
    }
    let [aqueous, lipid] = transform_partition(&TwoPhaseCoefficients {
        d1: *d1,
        d2: *d2,
        r1: 0.0,
        r2: 0.0,
        f1: 0.0,
        f2: 0.0,
        partition_coefficient,
    })?;
    let (lx, ly) = mask.extent();
    let grid = StructuredGrid::new(&[lx, ly], &[mask.width(), mask.height()])?;
    let mut tensors = Vec::with_capacity(grid.cell_count());
    let mut sigma = Vec::with_capacity(grid.cell_count());
    for cell in 0..grid.cell_count() {
        let c = grid.cell_coords(cell);
        let coeffs = match mask.get(c[0], mask.height() - 1 - c[1]) {
            Phase::Aqueous => &aqueous,
            Phase::Lipid => &lipid,
        };
        tensors.push(coeffs.d);
        sigma.push(coeffs.sigma);
    }
    Ok(TensorField::new(grid, tensors)?.with_sigma(sigma)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_stripes_hit_fraction() {
        let spec = SynthLayerSpec::perfect(0.1878, 4, 256, 16, 1.0);
        let mask = synth_layered_mask(&spec).unwrap();
        assert!((mask.lipid_fraction() - 0.1878).abs() <= 0.5 / 256.0);
        // every row identical without wobble
        for row in 1..mask.height() {
            for col in 0..mask.width() {
                assert_eq!(mask.get(col, row), mask.get(col, 0));
            }
        }
        // outermost columns stay aqueous
        assert_eq!(mask.get(0, 0), Phase::Aqueous);
        assert_eq!(mask.get(255, 0), Phase::Aqueous);
    }

    #[test]
    fn too_coarse_is_rejected() {
        let spec = SynthLayerSpec::perfect(0.001, 2, 64, 8, 1.0);
        assert!(matches!(synth_layered_mask(&spec), Err(ExperimentError::Config(_))));
        let spec = SynthLayerSpec::perfect(0.0, 2, 64, 8, 1.0);
        assert!(synth_layered_mask(&spec).is_err());
    }

    #[test]
    fn wobble_and_gaps_reproducible() {
        let spec = SynthLayerSpec {
            lipid_fraction: 0.2,
            layers: 5,
            wobble: 0.2,
            gap_density: 1.5,
            width: 200,
            height: 50,
            pixel_size: 1.0,
            seed: 17,
        };
        let a = synth_layered_mask(&spec).unwrap();
        let b = synth_layered_mask(&spec).unwrap();
        assert_eq!(a, b);
        assert!(a.lipid_fraction() < 0.2);
        let no_gaps = synth_layered_mask(&SynthLayerSpec { gap_density: 0.0, ..spec }).unwrap();
        assert!((no_gaps.lipid_fraction() - 0.2).abs() <= 0.5 / 200.0);
    }

    #[test]
    fn ingestion_applies_partition_transform() {
        let d1 = SymTensor::isotropic(2, 1.0e-14).unwrap();
        let d2 = SymTensor::diagonal(&[1.0e-12, 1.0e-10]).unwrap();
        let aq = PhaseMask::uniform(3, 2, Phase::Aqueous, 1e-8).unwrap();
        let field = ingest_mask(&aq, &d1, &d2, 1.26e-2).unwrap();
        assert!(field.tensors().iter().all(|t| *t == d1));
        assert_eq!(field.mean_sigma(), 1.0);

        let lip = PhaseMask::uniform(3, 2, Phase::Lipid, 1e-8).unwrap();
        let field = ingest_mask(&lip, &d1, &d2, 1.26e-2).unwrap();
        for t in field.tensors() {
            assert!((t.get(0, 0) - 7.9365e-11).abs() / 7.9365e-11 < 1e-4);
            assert!((t.get(1, 1) - 7.9365e-9).abs() / 7.9365e-9 < 1e-4);
        }
        assert!((field.sigma(0) - 1.0 / 1.26e-2).abs() < 1e-12);
    }

    #[test]
    fn image_rows_map_top_down() {
        // top row lipid, bottom row aqueous
        let mask = PhaseMask::new(2, 2, vec![Phase::Lipid, Phase::Lipid, Phase::Aqueous, Phase::Aqueous], 1.0).unwrap();
        let d1 = SymTensor::isotropic(2, 1.0).unwrap();
        let d2 = SymTensor::isotropic(2, 2.0).unwrap();
        let field = ingest_mask(&mask, &d1, &d2, 1.0).unwrap();
        assert_eq!(field.tensor(0).get(0, 0), 1.0);
        assert_eq!(field.tensor(2).get(0, 0), 2.0);
    }
}
