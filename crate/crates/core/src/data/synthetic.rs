//! Generated datasets for engine tests and demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{DataError, Dataset};

/// Feature carrying the label in the surface fixture.
pub const SIGNAL_COLUMN: &str = "signal";
/// Feature carrying a per-cell uniform position in `(0, 1)`.
pub const SLOT_COLUMN: &str = "slot";

/// Fixture consumed by the synthetic-surface trainer: two groups `a` and
/// `b`, equal cell sizes per (group, label), and within each cell a `slot`
/// feature spread evenly over `(0, 1)`.
pub fn surface_fixture(rows_per_cell: usize) -> Result<Dataset, DataError> {
    let n = rows_per_cell.max(1);
    let mut features = Vec::with_capacity(4 * n);
    let mut labels = Vec::with_capacity(4 * n);
    let mut groups = Vec::with_capacity(4 * n);
    // a multiplicative stride spreads consecutive rows over the unit interval
    let stride = coprime_stride(n);
    for j in 0..n {
        let slot = (((j * stride) % n) as f64 + 0.5) / n as f64;
        for (group, label) in [("a", 0u8), ("a", 1), ("b", 0), ("b", 1)] {
            features.push(vec![label.to_string(), format!("{slot:.9}")]);
            labels.push(label);
            groups.push(group.to_string());
        }
    }
    Dataset::from_parts(
        vec![SIGNAL_COLUMN.into(), SLOT_COLUMN.into()],
        "label",
        "group",
        features,
        labels,
        groups,
    )
}

fn coprime_stride(n: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let mut stride = ((n as f64) * 0.618_033_988_75) as usize;
    while stride > 1 && gcd(stride, n) != 1 {
        stride -= 1;
    }
    stride.max(1)
}

/// Parameters of [`group_noise_dataset`].
#[derive(Debug, Clone)]
pub struct GroupNoiseParams {
    pub rows: usize,
    /// Fraction of rows in group `minority`.
    pub minority_share: f64,
    /// Label flip probability in the majority group.
    pub majority_noise: f64,
    /// Label flip probability in the minority group.
    pub minority_noise: f64,
    pub seed: u64,
}

impl Default for GroupNoiseParams {
    fn default() -> Self {
        GroupNoiseParams {
            rows: 20_000,
            minority_share: 0.35,
            majority_noise: 0.02,
            minority_noise: 0.25,
            seed: 0,
        }
    }
}

/// Binary classification data with two groups whose labels are corrupted at
/// different rates. The minority group also follows a shifted decision rule
/// and is partly identifiable through the `district` feature, so strong
/// learners end up with unequal error rates across groups.
pub fn group_noise_dataset(params: &GroupNoiseParams) -> Result<Dataset, DataError> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut features = Vec::with_capacity(params.rows);
    let mut labels = Vec::with_capacity(params.rows);
    let mut groups = Vec::with_capacity(params.rows);
    for _ in 0..params.rows {
        let minority = rng.random::<f64>() < params.minority_share;
        let x: [f64; 5] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
        let logit = if minority {
            0.9 * x[0] + 0.4 * x[1] + 1.1 * x[3] - 1.0
        } else {
            1.6 * x[0] + 1.0 * x[1] - 0.8 * x[2] - 0.9
        };
        let clean = rng.random::<f64>() < 1.0 / (1.0 + (-logit).exp());
        let noise = if minority { params.minority_noise } else { params.majority_noise };
        let label = clean ^ (rng.random::<f64>() < noise);
        let district = match (minority, rng.random::<f64>()) {
            (true, u) if u < 0.7 => "north",
            (false, u) if u < 0.7 => "south",
            (_, u) if u < 0.85 => "east",
            _ => "west",
        };
        let mut row: Vec<String> = x.iter().map(|v| format!("{v:.6}")).collect();
        row.push(district.to_string());
        features.push(row);
        labels.push(u8::from(label));
        groups.push(if minority { "minority" } else { "majority" }.to_string());
    }
    let columns = ["x0", "x1", "x2", "x3", "x4", "district"].map(String::from).to_vec();
    Dataset::from_parts(columns, "label", "group", features, labels, groups)
}
