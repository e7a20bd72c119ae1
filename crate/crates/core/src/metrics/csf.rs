/// Contrast sensitivity model used to weight spatial frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CsfModel {
    /// `A(f) = 2.6 (0.0192 + 0.114 f) exp(-(0.114 f)^1.1)`, f in cycles/degree.
    #[default]
    MannosSakrison,
    /// Flat weighting; turns WSNR into a plain frequency-domain SNR.
    Unit,
}

impl CsfModel {
    pub fn weight(self, cycles_per_degree: f64) -> f64 {
        match self {
            CsfModel::MannosSakrison => mannos_sakrison(cycles_per_degree),
            CsfModel::Unit => 1.0,
        }
    }
}

pub fn mannos_sakrison(f: f64) -> f64 {
    2.6 * (0.0192 + 0.114 * f) * (-(0.114 * f).powf(1.1)).exp()
}

/// Peak contrast sensitivity scaling shared by the threshold models.
pub(crate) const PEAK_SENSITIVITY: f64 = 200.0;

/// Contrast detection threshold at `f` cycles/degree.
pub(crate) fn contrast_threshold(f: f64) -> f64 {
    1.0 / (PEAK_SENSITIVITY * mannos_sakrison(f))
}
