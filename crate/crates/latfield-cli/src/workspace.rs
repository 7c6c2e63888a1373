//! Objects, morphisms and lazily built phase spaces shared by all suites.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use latfield::functor::Morphism;
use latfield::gauge::SpacetimeObject;
use latfield::phasespace::{Model, PhaseSpace, Variant};
use latfield::ModelError;

use crate::config::{ExperimentConfig, MorphismKind};
use crate::error::CliError;

type Lazy<T> = OnceLock<Result<T, ModelError>>;

pub struct Workspace {
    models: BTreeMap<String, Model>,
    /// Standard and charge-zero phase spaces per object.
    phase: BTreeMap<String, [Lazy<PhaseSpace>; 2]>,
    morphisms: BTreeMap<String, Morphism>,
}

fn slot(v: Variant) -> usize {
    match v {
        Variant::Standard => 0,
        Variant::ChargeZero => 1,
    }
}

impl Workspace {
    /// Build every object and morphism; any model error here is a configuration error.
    pub fn new(config: &ExperimentConfig) -> Result<Workspace, CliError> {
        let mut models = BTreeMap::new();
        let mut phase = BTreeMap::new();
        for spec in &config.objects {
            let obj = SpacetimeObject::new(spec.clone()).map_err(|e| CliError::Config(format!("object {:?}: {e}", spec.id)))?;
            models.insert(spec.id.clone(), Model::new(obj));
            phase.insert(spec.id.clone(), [OnceLock::new(), OnceLock::new()]);
        }
        let mut morphisms = BTreeMap::new();
        for m in &config.morphisms {
            let (s, t) = (&models[&m.source].obj, &models[&m.target].obj);
            let f = match &m.kind {
                MorphismKind::Identity if m.source == m.target => Morphism::identity(s),
                MorphismKind::Identity => Err(ModelError::Config("an identity must have equal source and target".into())),
                MorphismKind::Translate { offsets } => Morphism::translate(s, t, offsets),
                MorphismKind::Inclusion => Morphism::inclusion(s, t),
            }
            .map_err(|e| CliError::Config(format!("morphism {:?}: {e}", m.id)))?;
            morphisms.insert(m.id.clone(), f);
        }
        Ok(Workspace { models, phase, morphisms })
    }

    pub fn model(&self, id: &str) -> Result<&Model, ModelError> {
        self.models.get(id).ok_or_else(|| ModelError::Config(format!("unknown object {id:?}")))
    }

    pub fn phase_space(&self, id: &str, v: Variant) -> Result<&PhaseSpace, ModelError> {
        let m = self.model(id)?;
        self.phase[id][slot(v)].get_or_init(|| m.phase_space(v)).as_ref().map_err(Clone::clone)
    }

    pub fn morphism(&self, id: &str) -> Result<&Morphism, ModelError> {
        self.morphisms.get(id).ok_or_else(|| ModelError::Config(format!("unknown morphism {id:?}")))
    }
}
