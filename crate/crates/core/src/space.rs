//! Hyperparameter search spaces.
//!
//! A space is two-level: the model type is a categorical choice, and each
//! model type owns its own list of dimensions. Dimensions listed under
//! `shared` (for example an undersampling target) apply to every model type.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Maximum draws attempted per requested configuration before giving up.
pub const MAX_SAMPLE_RETRIES: usize = 1000;

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("syntax error in space document: {0}")]
    Syntax(String),
    #[error("invalid space: {0}")]
    Semantic(String),
    #[error("space exhausted: {available} distinct configurations available, {requested} requested")]
    Exhausted { available: u128, requested: usize },
    #[error("could not draw {requested} distinct configurations within {MAX_SAMPLE_RETRIES} retries per sample")]
    RetryLimit { requested: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DimensionKind {
    Uniform { low: f64, high: f64 },
    LogUniform { low: f64, high: f64 },
    IntUniform { low: i64, high: i64 },
    Categorical { choices: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    #[serde(flatten)]
    pub kind: DimensionKind,
}

impl Dimension {
    pub fn new(name: impl Into<String>, kind: DimensionKind) -> Result<Self, SpaceError> {
        let dim = Dimension { name: name.into(), kind };
        dim.validate()?;
        Ok(dim)
    }

    pub fn uniform(name: &str, low: f64, high: f64) -> Result<Self, SpaceError> {
        Self::new(name, DimensionKind::Uniform { low, high })
    }

    pub fn log_uniform(name: &str, low: f64, high: f64) -> Result<Self, SpaceError> {
        Self::new(name, DimensionKind::LogUniform { low, high })
    }

    pub fn int_uniform(name: &str, low: i64, high: i64) -> Result<Self, SpaceError> {
        Self::new(name, DimensionKind::IntUniform { low, high })
    }

    pub fn categorical<S: Into<String>>(
        name: &str,
        choices: impl IntoIterator<Item = S>,
    ) -> Result<Self, SpaceError> {
        let choices = choices.into_iter().map(Into::into).collect();
        Self::new(name, DimensionKind::Categorical { choices })
    }

    fn validate(&self) -> Result<(), SpaceError> {
        let bad = |msg: String| Err(SpaceError::Semantic(format!("dimension `{}`: {msg}", self.name)));
        if self.name.trim().is_empty() {
            return Err(SpaceError::Semantic("dimension with empty name".into()));
        }
        match &self.kind {
            DimensionKind::Uniform { low, high } => {
                if !(low.is_finite() && high.is_finite()) || low >= high {
                    return bad(format!("need finite low < high, got [{low}, {high}]"));
                }
            }
            DimensionKind::LogUniform { low, high } => {
                if !(low.is_finite() && high.is_finite()) || low >= high {
                    return bad(format!("need finite low < high, got [{low}, {high}]"));
                }
                if *low <= 0.0 {
                    return bad(format!("log-uniform needs low > 0, got {low}"));
                }
            }
            DimensionKind::IntUniform { low, high } => {
                if low >= high {
                    return bad(format!("need low < high, got [{low}, {high}]"));
                }
            }
            DimensionKind::Categorical { choices } => {
                if choices.is_empty() {
                    return bad("categorical needs at least one choice".into());
                }
                let unique: HashSet<&String> = choices.iter().collect();
                if unique.len() != choices.len() {
                    return bad("duplicate categorical choice".into());
                }
            }
        }
        Ok(())
    }

    /// Number of distinct values, or `None` for continuous dimensions.
    fn cardinality(&self) -> Option<u128> {
        match &self.kind {
            DimensionKind::IntUniform { low, high } => Some((*high as i128 - *low as i128 + 1) as u128),
            DimensionKind::Categorical { choices } => Some(choices.len() as u128),
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Value {
        match &self.kind {
            DimensionKind::Uniform { low, high } => Value::Real(rng.random_range(*low..*high)),
            DimensionKind::LogUniform { low, high } => {
                Value::Real(rng.random_range(low.ln()..high.ln()).exp().clamp(*low, *high))
            }
            DimensionKind::IntUniform { low, high } => Value::Int(rng.random_range(*low..=*high)),
            DimensionKind::Categorical { choices } => {
                Value::Choice(choices[rng.random_range(0..choices.len())].clone())
            }
        }
    }

    /// Whether `value` lies inside this dimension's bounds or choices.
    pub fn contains(&self, value: &Value) -> bool {
        match (&self.kind, value) {
            (DimensionKind::Uniform { low, high }, Value::Real(x))
            | (DimensionKind::LogUniform { low, high }, Value::Real(x)) => *low <= *x && *x <= *high,
            (DimensionKind::IntUniform { low, high }, Value::Int(x)) => low <= x && x <= high,
            (DimensionKind::Categorical { choices }, Value::Choice(c)) => choices.contains(c),
            _ => false,
        }
    }
}

/// A sampled hyperparameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Real(f64),
    Choice(String),
}

impl Value {
    /// Numeric view; categorical choices are parsed when they look numeric.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Real(x) => Some(*x),
            Value::Choice(s) => s.trim().parse().ok(),
        }
    }

    fn canonical(&self) -> String {
        match self {
            Value::Int(i) => format!("i:{i}"),
            // 12 significant digits
            Value::Real(x) => format!("r:{x:.11e}"),
            Value::Choice(s) => format!("c:{s}"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(x) => write!(f, "{x}"),
            Value::Choice(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceSpec {
    pub model_types: Vec<String>,
    pub per_model: BTreeMap<String, Vec<Dimension>>,
    pub shared: Vec<Dimension>,
}

impl SpaceSpec {
    pub fn new(
        model_types: Vec<String>,
        per_model: BTreeMap<String, Vec<Dimension>>,
        shared: Vec<Dimension>,
    ) -> Result<Self, SpaceError> {
        let spec = SpaceSpec { model_types, per_model, shared };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), SpaceError> {
        if self.model_types.is_empty() {
            return Err(SpaceError::Semantic("space declares no model types".into()));
        }
        let types: BTreeSet<&String> = self.model_types.iter().collect();
        if types.len() != self.model_types.len() {
            return Err(SpaceError::Semantic("duplicate model type".into()));
        }
        for key in self.per_model.keys() {
            if !types.contains(key) {
                return Err(SpaceError::Semantic(format!(
                    "dimensions declared for unknown model type `{key}`"
                )));
            }
        }
        let mut shared_names = HashSet::new();
        for dim in &self.shared {
            dim.validate()?;
            if !shared_names.insert(dim.name.as_str()) {
                return Err(SpaceError::Semantic(format!("duplicate shared dimension `{}`", dim.name)));
            }
        }
        for (model, dims) in &self.per_model {
            let mut names = HashSet::new();
            for dim in dims {
                dim.validate()?;
                if shared_names.contains(dim.name.as_str()) {
                    return Err(SpaceError::Semantic(format!(
                        "dimension `{}` of `{model}` collides with a shared dimension",
                        dim.name
                    )));
                }
                if !names.insert(dim.name.as_str()) {
                    return Err(SpaceError::Semantic(format!(
                        "duplicate dimension `{}` for `{model}`",
                        dim.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Parses a TOML document holding a `[space]` table.
    ///
    /// ```toml
    /// [space]
    /// model_types = ["logistic", "tree"]
    ///
    /// [space.shared.undersample_pos_rate]
    /// kind = "categorical"
    /// choices = [0.05, 0.10, 0.20]
    ///
    /// [space.models.tree.max_depth]
    /// kind = "int-uniform"
    /// low = 1
    /// high = 20
    /// ```
    pub fn from_toml_str(text: &str) -> Result<Self, SpaceError> {
        #[derive(Deserialize)]
        struct Doc {
            space: SpaceDocument,
        }
        let doc: Doc = toml::from_str(text).map_err(|e| SpaceError::Syntax(e.to_string()))?;
        doc.space.into_spec()
    }

    /// Dimensions that make up the subspace of `model_type`: its own, then shared.
    pub fn dimensions_for<'a>(&'a self, model_type: &str) -> impl Iterator<Item = &'a Dimension> + 'a {
        self.per_model
            .get(model_type)
            .map(|d| d.as_slice())
            .unwrap_or_default()
            .iter()
            .chain(self.shared.iter())
    }

    /// Number of distinct configurations, `None` when any reachable dimension is continuous.
    pub fn distinct_count(&self) -> Option<u128> {
        let mut total: u128 = 0;
        for model in &self.model_types {
            let mut count: u128 = 1;
            for dim in self.dimensions_for(model) {
                count = count.saturating_mul(dim.cardinality()?);
            }
            total = total.saturating_add(count);
        }
        Some(total)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Configuration {
        let model_type = &self.model_types[rng.random_range(0..self.model_types.len())];
        let values = self
            .dimensions_for(model_type)
            .map(|dim| (dim.name.clone(), dim.sample(rng)))
            .collect();
        Configuration::new(model_type.clone(), values)
    }

    /// Draws `n` configurations with pairwise distinct ids.
    pub fn sample_unique<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<Configuration>, SpaceError> {
        self.sample_unique_excluding(n, rng, &mut HashSet::new())
    }

    /// Like [`SpaceSpec::sample_unique`], additionally avoiding every id in
    /// `seen`. Accepted ids are inserted into `seen`.
    pub fn sample_unique_excluding<R: Rng + ?Sized>(
        &self,
        n: usize,
        rng: &mut R,
        seen: &mut HashSet<String>,
    ) -> Result<Vec<Configuration>, SpaceError> {
        if let Some(available) = self.distinct_count() {
            let remaining = available.saturating_sub(seen.len() as u128);
            if remaining < n as u128 {
                return Err(SpaceError::Exhausted { available: remaining, requested: n });
            }
        }
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let mut accepted = None;
            for _ in 0..MAX_SAMPLE_RETRIES {
                let config = self.sample(rng);
                if seen.insert(config.id.clone()) {
                    accepted = Some(config);
                    break;
                }
            }
            out.push(accepted.ok_or(SpaceError::RetryLimit { requested: n })?);
        }
        Ok(out)
    }

    /// Checks that `config` is a point of this space.
    pub fn contains(&self, config: &Configuration) -> bool {
        if !self.model_types.contains(&config.model_type) {
            return false;
        }
        let dims: Vec<&Dimension> = self.dimensions_for(&config.model_type).collect();
        dims.len() == config.values.len()
            && dims
                .iter()
                .all(|d| config.values.get(&d.name).is_some_and(|v| d.contains(v)))
    }
}

/// Serde shape of the `[space]` table.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDocument {
    pub model_types: Vec<String>,
    #[serde(default)]
    pub shared: BTreeMap<String, DimensionDocument>,
    #[serde(default)]
    pub models: BTreeMap<String, BTreeMap<String, DimensionDocument>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionDocument {
    pub kind: String,
    pub low: Option<f64>,
    pub high: Option<f64>,
    pub choices: Option<Vec<ChoiceLiteral>>,
}

/// Categorical choices may be written as strings or bare numbers.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ChoiceLiteral {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl ChoiceLiteral {
    fn into_string(self) -> String {
        match self {
            ChoiceLiteral::Int(i) => i.to_string(),
            ChoiceLiteral::Float(x) => x.to_string(),
            ChoiceLiteral::Bool(b) => b.to_string(),
            ChoiceLiteral::Text(s) => s,
        }
    }
}

impl DimensionDocument {
    fn into_dimension(self, name: &str) -> Result<Dimension, SpaceError> {
        let range = |low: Option<f64>, high: Option<f64>| match (low, high) {
            (Some(l), Some(h)) => Ok((l, h)),
            _ => Err(SpaceError::Semantic(format!("dimension `{name}` needs `low` and `high`"))),
        };
        let kind = match self.kind.as_str() {
            "uniform" => {
                let (low, high) = range(self.low, self.high)?;
                DimensionKind::Uniform { low, high }
            }
            "log-uniform" => {
                let (low, high) = range(self.low, self.high)?;
                DimensionKind::LogUniform { low, high }
            }
            "int-uniform" => {
                let (low, high) = range(self.low, self.high)?;
                if low.fract() != 0.0 || high.fract() != 0.0 {
                    return Err(SpaceError::Semantic(format!(
                        "dimension `{name}`: int-uniform bounds must be integers"
                    )));
                }
                DimensionKind::IntUniform { low: low as i64, high: high as i64 }
            }
            "categorical" => {
                let choices = self.choices.ok_or_else(|| {
                    SpaceError::Semantic(format!("dimension `{name}` needs `choices`"))
                })?;
                DimensionKind::Categorical {
                    choices: choices.into_iter().map(ChoiceLiteral::into_string).collect(),
                }
            }
            other => {
                return Err(SpaceError::Semantic(format!(
                    "dimension `{name}`: unknown kind `{other}`"
                )))
            }
        };
        Dimension::new(name, kind)
    }
}

impl SpaceDocument {
    pub fn into_spec(self) -> Result<SpaceSpec, SpaceError> {
        let shared = self
            .shared
            .into_iter()
            .map(|(name, d)| d.into_dimension(&name))
            .collect::<Result<Vec<_>, _>>()?;
        let mut per_model = BTreeMap::new();
        for (model, dims) in self.models {
            let dims = dims
                .into_iter()
                .map(|(name, d)| d.into_dimension(&name))
                .collect::<Result<Vec<_>, _>>()?;
            per_model.insert(model, dims);
        }
        SpaceSpec::new(self.model_types, per_model, shared)
    }
}

/// One point of a [`SpaceSpec`]. The id depends only on content.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub id: String,
    pub model_type: String,
    pub values: BTreeMap<String, Value>,
}

impl Configuration {
    pub fn new(model_type: String, values: BTreeMap<String, Value>) -> Self {
        let id = config_id(&model_type, &values);
        Configuration { id, model_type, values }
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values.get(name)
    }

    pub fn get_f64(&self, name: &str) -> Option<f64> {
        self.values.get(name).and_then(Value::as_f64)
    }

    /// Recomputes the id from content; false when it was tampered with.
    pub fn id_is_consistent(&self) -> bool {
        self.id == config_id(&self.model_type, &self.values)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.model_type, self.id)?;
        for (name, value) in &self.values {
            write!(f, " {name}={value}")?;
        }
        Ok(())
    }
}

/// SHA-256 over the canonical form, truncated to 16 hex characters.
pub fn config_id(model_type: &str, values: &BTreeMap<String, Value>) -> String {
    let mut canonical = format!("model={model_type}\n");
    for (name, value) in values {
        canonical.push_str(name);
        canonical.push('=');
        canonical.push_str(&value.canonical());
        canonical.push('\n');
    }
    let digest = Sha256::digest(canonical.as_bytes());
    hex::encode(&digest[..8])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const DOC: &str = r#"
[space]
model_types = ["logistic", "tree"]

[space.shared.undersample_pos_rate]
kind = "categorical"
choices = [0.05, 0.10, 0.20]

[space.models.tree.max_depth]
kind = "int-uniform"
low = 1
high = 20

[space.models.logistic.learning_rate]
kind = "log-uniform"
low = 1e-4
high = 1.0
"#;

    #[test]
    fn parses_two_model_types() {
        let space = SpaceSpec::from_toml_str(DOC).unwrap();
        assert_eq!(space.model_types, vec!["logistic", "tree"]);
        assert_eq!(space.per_model["tree"][0].kind, DimensionKind::IntUniform { low: 1, high: 20 });
    }

    #[test]
    fn undersampling_choices_accepted() {
        let space = SpaceSpec::from_toml_str(DOC).unwrap();
        assert_eq!(
            space.shared[0].kind,
            DimensionKind::Categorical { choices: vec!["0.05".into(), "0.1".into(), "0.2".into()] }
        );
    }

    #[test]
    fn log_uniform_zero_low_rejected() {
        let doc = r#"
[space]
model_types = ["logistic"]
[space.models.logistic.lr]
kind = "log-uniform"
low = 0.0
high = 1.0
"#;
        assert!(matches!(SpaceSpec::from_toml_str(doc), Err(SpaceError::Semantic(_))));
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = SpaceSpec::from_toml_str("[space\nmodel_types = 3").unwrap_err();
        match err {
            SpaceError::Syntax(msg) => assert!(msg.contains("line 1"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn semantic_errors() {
        let empty = "[space]\nmodel_types = []\n";
        assert!(matches!(SpaceSpec::from_toml_str(empty), Err(SpaceError::Semantic(_))));

        let unknown = "[space]\nmodel_types = [\"a\"]\n[space.models.b.x]\nkind = \"uniform\"\nlow = 0\nhigh = 1\n";
        assert!(matches!(SpaceSpec::from_toml_str(unknown), Err(SpaceError::Semantic(_))));

        let collide = "[space]\nmodel_types = [\"a\"]\n[space.shared.x]\nkind = \"uniform\"\nlow = 0\nhigh = 1\n[space.models.a.x]\nkind = \"uniform\"\nlow = 0\nhigh = 1\n";
        assert!(matches!(SpaceSpec::from_toml_str(collide), Err(SpaceError::Semantic(_))));

        let bad_bounds = "[space]\nmodel_types = [\"a\"]\n[space.models.a.x]\nkind = \"uniform\"\nlow = 2\nhigh = 1\n";
        assert!(matches!(SpaceSpec::from_toml_str(bad_bounds), Err(SpaceError::Semantic(_))));

        assert!(Dimension::categorical("c", ["x", "x"]).is_err());
        assert!(Dimension::categorical("c", Vec::<String>::new()).is_err());
    }

    fn singleton_space() -> SpaceSpec {
        let mut per_model = BTreeMap::new();
        per_model.insert("m".to_string(), vec![Dimension::categorical("c", ["only"]).unwrap()]);
        SpaceSpec::new(vec!["m".into()], per_model, vec![]).unwrap()
    }

    #[test]
    fn singleton_space_samples_unique_configuration() {
        let space = singleton_space();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = space.sample(&mut rng);
        let b = space.sample(&mut rng);
        assert_eq!(a, b);
        assert_eq!(a.values["c"], Value::Choice("only".into()));
    }

    #[test]
    fn exhausted_space_errors() {
        let space = singleton_space();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(space.sample_unique(1, &mut rng).unwrap().len(), 1);
        assert!(matches!(
            space.sample_unique(2, &mut rng),
            Err(SpaceError::Exhausted { available: 1, requested: 2 })
        ));
    }

    fn mixed_space(models: usize) -> SpaceSpec {
        let model_types: Vec<String> = (0..models).map(|i| format!("m{i}")).collect();
        let mut per_model = BTreeMap::new();
        for m in &model_types {
            per_model.insert(
                m.clone(),
                vec![
                    Dimension::uniform("x", 0.0, 1.0).unwrap(),
                    Dimension::int_uniform("k", 1, 20).unwrap(),
                ],
            );
        }
        let shared = vec![Dimension::categorical("rate", ["0.05", "0.1", "0.2"]).unwrap()];
        SpaceSpec::new(model_types, per_model, shared).unwrap()
    }

    #[test]
    fn sample_unique_distinct_and_deterministic() {
        let space = mixed_space(5);
        let first = space.sample_unique(81, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let ids: HashSet<_> = first.iter().map(|c| c.id.clone()).collect();
        assert_eq!(ids.len(), 81);
        let second = space.sample_unique(81, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn model_types_drawn_uniformly() {
        let space = mixed_space(5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = BTreeMap::new();
        let draws = 1_000_000;
        for _ in 0..draws {
            // only the model-type draw matters here; sample() also draws values
            let c = space.sample(&mut rng);
            *counts.entry(c.model_type).or_insert(0usize) += 1;
        }
        for (_, n) in counts {
            let freq = n as f64 / draws as f64;
            assert!((freq - 0.2).abs() < 0.01, "{freq}");
        }
    }

    #[test]
    fn log_uniform_matches_closed_form_cdf() {
        // P(x < 1e-3) for log-uniform on [1e-4, 1] is ln(10)/ln(1e4) = 0.25.
        let dim = Dimension::log_uniform("lr", 1e-4, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let below = (0..n)
            .filter(|_| dim.sample(&mut rng).as_f64().unwrap() < 1e-3)
            .count();
        let frac = below as f64 / n as f64;
        assert!((frac - 0.25).abs() < 0.01, "{frac}");
    }

    #[test]
    fn id_depends_on_content_only() {
        let mut values = BTreeMap::new();
        values.insert("x".to_string(), Value::Real(0.1 + 0.2));
        values.insert("k".to_string(), Value::Int(3));
        let a = Configuration::new("m".into(), values.clone());
        let b = Configuration::new("m".into(), values.clone());
        assert_eq!(a.id, b.id);
        let c = Configuration::new("n".into(), values);
        assert_ne!(a.id, c.id);
    }

    #[test]
    fn id_survives_json_round_trip() {
        let space = mixed_space(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let config = space.sample(&mut rng);
            let text = serde_json::to_string(&config).unwrap();
            let back: Configuration = serde_json::from_str(&text).unwrap();
            assert_eq!(back, config);
            assert!(back.id_is_consistent());
        }
    }

    fn arb_dimension(name: String) -> impl Strategy<Value = Dimension> {
        prop_oneof![
            (-100.0f64..100.0, 0.001f64..50.0)
                .prop_map(|(low, w)| DimensionKind::Uniform { low, high: low + w }),
            (1e-6f64..10.0, 1.01f64..1000.0)
                .prop_map(|(low, m)| DimensionKind::LogUniform { low, high: low * m }),
            (-50i64..50, 1i64..30).prop_map(|(low, w)| DimensionKind::IntUniform { low, high: low + w }),
            (1usize..6).prop_map(|n| DimensionKind::Categorical {
                choices: (0..n).map(|i| format!("c{i}")).collect()
            }),
        ]
        .prop_map(move |kind| Dimension { name: name.clone(), kind })
    }

    fn arb_space() -> impl Strategy<Value = SpaceSpec> {
        (1usize..4, proptest::collection::vec(any::<u8>(), 1..4)).prop_flat_map(|(models, sizes)| {
            let model_types: Vec<String> = (0..models).map(|i| format!("m{i}")).collect();
            let dims: Vec<_> = sizes
                .iter()
                .enumerate()
                .map(|(i, _)| arb_dimension(format!("d{i}")))
                .collect();
            (Just(model_types), dims, arb_dimension("shared".into())).prop_map(
                |(model_types, dims, shared)| {
                    let per_model = model_types.iter().map(|m| (m.clone(), dims.clone())).collect();
                    SpaceSpec::new(model_types, per_model, vec![shared]).unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn samples_respect_bounds(space in arb_space(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..50 {
                let config = space.sample(&mut rng);
                prop_assert!(space.contains(&config), "{config}");
            }
        }

        #[test]
        fn same_seed_same_sequence(space in arb_space(), seed in any::<u64>()) {
            let a: Vec<_> = {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..20).map(|_| space.sample(&mut rng)).collect()
            };
            let b: Vec<_> = {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..20).map(|_| space.sample(&mut rng)).collect()
            };
            prop_assert_eq!(a, b);
        }
    }
}
