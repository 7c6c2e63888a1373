//! Experiment configuration: objects, morphisms and the suites to run.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use latfield::gauge::ObjectSpec;
use latfield::phasespace::Variant;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Seed used when the configuration does not name one.
pub const DEFAULT_SEED: u64 = 0x5EED_1A7F;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Directory receiving every report; relative paths resolve against the working directory.
    pub output_dir: PathBuf,
    #[serde(default)]
    pub objects: Vec<ObjectSpec>,
    #[serde(default)]
    pub morphisms: Vec<MorphismSpec>,
    #[serde(default)]
    pub suites: Vec<SuiteSpec>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct MorphismSpec {
    pub id: String,
    pub source: String,
    pub target: String,
    #[serde(flatten)]
    pub kind: MorphismKind,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MorphismKind {
    Identity,
    /// Translation of a product by per-factor offsets.
    Translate { offsets: Vec<usize> },
    /// Inclusion of a carved object into its host.
    Inclusion,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct SuiteSpec {
    pub id: String,
    #[serde(flatten)]
    pub check: Check,
}

fn both_variants() -> Vec<Variant> {
    vec![Variant::Standard, Variant::ChargeZero]
}

fn yes() -> bool {
    true
}

fn hundred() -> usize {
    100
}

fn twenty_five() -> usize {
    25
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Check {
    /// Gauge-invariant linear parts computed directly and from the closed-form characterization.
    GaugeInvariance { objects: Vec<String> },
    /// `E^min ⊆ E^inv ⊆ E^max` and the size of the upper gap.
    Sandwich { objects: Vec<String> },
    /// Null space of the Gram matrix against the predicted radical.
    Radical {
        objects: Vec<String>,
        #[serde(default = "both_variants")]
        variants: Vec<Variant>,
        /// When false the comparison is reported as a measurement.
        #[serde(default = "yes")]
        asserted: bool,
    },
    /// Radical classes without a representative of zero linear part, and their absence on compact slices.
    RadicalWitness {
        objects: Vec<String>,
        #[serde(default)]
        compact_slices: Vec<String>,
    },
    /// Two flat connections differing by a period-π holonomy, with a control object.
    Separation { object: String, control: String },
    /// Green operator identities on random compact sources.
    Green {
        objects: Vec<String>,
        #[serde(default = "hundred")]
        samples: usize,
    },
    /// Cross-Gram of two morphisms into a common target; `control` is a causally related pair.
    Causality {
        first: String,
        second: String,
        #[serde(default)]
        control: Option<[String; 2]>,
    },
    /// Slab embeddings induce isomorphisms; `controls` are reported only.
    Timeslice {
        morphisms: Vec<String>,
        #[serde(default)]
        controls: Vec<String>,
    },
    /// Kernel of the induced map of a cone-complement inclusion, for both variants.
    Locality { morphism: String },
    /// Identities and composition; `first` must end where `second` starts.
    Functoriality { first: String, second: String },
    /// Magnetic and electric charges: values, centrality, vanishing in `E⁰`.
    Charges { objects: Vec<String> },
    /// Commuting squares of the charge maps.
    Naturality { morphisms: Vec<String> },
    /// CCR algebra laws, induced star-homomorphisms and commuting disjoint images.
    Ccr {
        object: String,
        #[serde(default)]
        morphism: Option<String>,
        #[serde(default)]
        disjoint: Option<[String; 2]>,
        #[serde(default = "twenty_five")]
        samples: usize,
    },
}

impl Check {
    pub fn name(&self) -> &'static str {
        match self {
            Check::GaugeInvariance { .. } => "gauge_invariance",
            Check::Sandwich { .. } => "sandwich",
            Check::Radical { .. } => "radical",
            Check::RadicalWitness { .. } => "radical_witness",
            Check::Separation { .. } => "separation",
            Check::Green { .. } => "green",
            Check::Causality { .. } => "causality",
            Check::Timeslice { .. } => "timeslice",
            Check::Locality { .. } => "locality",
            Check::Functoriality { .. } => "functoriality",
            Check::Charges { .. } => "charges",
            Check::Naturality { .. } => "naturality",
            Check::Ccr { .. } => "ccr",
        }
    }

    /// Object and morphism ids the suite refers to.
    fn references(&self) -> (Vec<&String>, Vec<&String>) {
        match self {
            Check::GaugeInvariance { objects } | Check::Sandwich { objects } | Check::Charges { objects } => (objects.iter().collect(), vec![]),
            Check::Radical { objects, .. } | Check::Green { objects, .. } => (objects.iter().collect(), vec![]),
            Check::RadicalWitness { objects, compact_slices } => (objects.iter().chain(compact_slices).collect(), vec![]),
            Check::Separation { object, control } => (vec![object, control], vec![]),
            Check::Causality { first, second, control } => (vec![], [first, second].into_iter().chain(control.iter().flatten()).collect()),
            Check::Timeslice { morphisms, controls } => (vec![], morphisms.iter().chain(controls).collect()),
            Check::Locality { morphism } => (vec![], vec![morphism]),
            Check::Functoriality { first, second } => (vec![], vec![first, second]),
            Check::Naturality { morphisms } => (vec![], morphisms.iter().collect()),
            Check::Ccr { object, morphism, disjoint, .. } => (vec![object], morphism.iter().chain(disjoint.iter().flatten()).collect()),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        ExperimentConfig::parse(&text)
    }

    pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn object(&self, id: &str) -> Option<&ObjectSpec> {
        self.objects.iter().find(|o| o.id == id)
    }

    /// Ids are unique, references resolve, and morphisms join objects with equal structure groups.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let mut seen = BTreeSet::new();
        for id in self.objects.iter().map(|o| &o.id) {
            if !seen.insert(id) {
                return bad(format!("duplicate object id {id:?}"));
            }
        }
        let mut morphisms: BTreeMap<&String, &MorphismSpec> = BTreeMap::new();
        for m in &self.morphisms {
            if morphisms.insert(&m.id, m).is_some() {
                return bad(format!("duplicate morphism id {:?}", m.id));
            }
            let (Some(s), Some(t)) = (self.object(&m.source), self.object(&m.target)) else {
                return bad(format!("morphism {:?} refers to an unknown object", m.id));
            };
            if (s.torus, s.real, &s.h) != (t.torus, t.real, &t.h) {
                return bad(format!("morphism {:?} joins objects with different structure groups", m.id));
            }
        }
        let mut suites = BTreeSet::new();
        for s in &self.suites {
            if !suites.insert(&s.id) {
                return bad(format!("duplicate suite id {:?}", s.id));
            }
            // Suite ids name report files.
            let reserved = ["report", "results"].contains(&s.id.as_str());
            if reserved || s.id.is_empty() || !s.id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return bad(format!("suite id {:?} must be a plain file name other than report or results", s.id));
            }
            let (objects, maps) = s.check.references();
            if let Some(o) = objects.iter().find(|o| self.object(o).is_none()) {
                return bad(format!("suite {:?} refers to unknown object {o:?}", s.id));
            }
            if let Some(m) = maps.iter().find(|m| !morphisms.contains_key(*m)) {
                return bad(format!("suite {:?} refers to unknown morphism {m:?}", s.id));
            }
        }
        Ok(())
    }
}
