//! Scenario configuration files.

use std::path::PathBuf;

use photomech_core::energy::{BulkLoads, MaterialParams};
use photomech_core::femcore::{
    affine_state, apply_dirichlet, Attenuation, BoxMeshSpec, DirichletValue, FieldKind, LoadCase, Mesh, Model, NodeSet,
    SurfacePatch, TimeProfile,
};
use photomech_core::solvers::{Scenario, SolverConfig};
use photomech_core::{Mat3, Pair, Vec3};
use serde::{Deserialize, Serialize};

pub const DEFAULT_UNITS: &str = "nondimensional";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default = "default_units")]
    pub units: String,
    pub geometry: BoxMeshSpec,
    #[serde(default)]
    pub material: MaterialParams,
    #[serde(default)]
    pub loads: LoadsConfig,
    #[serde(default)]
    pub bcs: Vec<BoundaryCondition>,
    pub solver: SolverConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
}

fn default_units() -> String {
    DEFAULT_UNITS.to_string()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadsConfig {
    #[serde(default)]
    pub profile: TimeProfile,
    #[serde(default)]
    pub bulk: BulkLoads,
    #[serde(default)]
    pub attenuation: Option<Attenuation>,
    #[serde(default)]
    pub surface: Vec<SurfacePatch>,
}

impl LoadsConfig {
    pub fn load_case(&self) -> LoadCase {
        LoadCase {
            bulk: self.bulk,
            attenuation: self.attenuation,
            surface: self.surface.clone(),
            profile: self.profile,
        }
    }
}

/// A constraint on one field over a node set such as `matter:-x`,
/// `domain:+z`, `matter`, `truncation` or `all`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryCondition {
    pub boundary: String,
    pub field: FieldKind,
    /// Potential value, displacement vector or order pair. Omitted values
    /// hold the initial state.
    #[serde(default)]
    pub value: Option<BcValue>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BcValue {
    Scalar(f64),
    Vector(Vec3),
    Order(Pair<Vec3>),
}

/// Affine initial state: potential `potential - field.X`, uniform order and
/// placement `F X`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialConfig {
    pub potential: f64,
    pub field: Vec3,
    pub order: Pair<Vec3>,
    pub def_grad: Option<Mat3>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: Option<PathBuf>,
    /// Every `snapshot_stride`-th frame is written; zero writes only the
    /// first and last.
    pub snapshot_stride: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: None, snapshot_stride: 1 }
    }
}

/// Configuration problem with the offending field and, when known, the line.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("config error in `{field}`{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
pub struct ConfigError {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(text: &str, field: &str, message: impl Into<String>) -> Self {
        ConfigError { field: field.to_string(), line: locate(text, field), message: message.into() }
    }
}

impl ScenarioConfig {
    /// Parses and validates a configuration.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::new(text);
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.inner();
            let message = inner.message().to_string();
            let field = match missing_field(&message) {
                Some(m) if path == "." || path.is_empty() => m.to_string(),
                Some(m) => format!("{path}.{m}"),
                None => path,
            };
            let line = inner.span().map(|s| line_of(text, s.start)).or_else(|| locate(text, &field));
            ConfigError { field, line, message }
        })?;
        cfg.validate(text)?;
        Ok(cfg)
    }

    pub fn validate(&self, text: &str) -> Result<(), ConfigError> {
        if self.name.trim().is_empty() {
            return Err(ConfigError::at(text, "name", "must not be empty"));
        }
        if self.units != DEFAULT_UNITS {
            return Err(ConfigError::at(text, "units", format!("unsupported unit system `{}`", self.units)));
        }
        let core = |field: &str, r: photomech_core::Result<()>| r.map_err(|e| ConfigError::at(text, field, e.to_string()));
        core("geometry", self.geometry.validate())?;
        core("material", self.material.validate())?;
        core("loads", self.loads.load_case().validate())?;
        core("solver", self.solver.validate())?;
        for (i, bc) in self.bcs.iter().enumerate() {
            let field = format!("bcs[{i}]");
            if NodeSet::parse(&bc.boundary).is_none() {
                return Err(ConfigError::at(text, &format!("{field}.boundary"), format!("unknown boundary `{}`", bc.boundary)));
            }
            if let Some(v) = bc.value {
                let ok = matches!(
                    (bc.field, v),
                    (FieldKind::Potential, BcValue::Scalar(_))
                        | (FieldKind::Placement, BcValue::Vector(_))
                        | (FieldKind::Electronic, BcValue::Order(_))
                );
                if !ok {
                    return Err(ConfigError::at(
                        text,
                        &format!("{field}.value"),
                        format!("value does not match field `{:?}`", bc.field).to_lowercase(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Discretizes the scenario and imposes the boundary conditions.
    pub fn build(&self) -> Result<Scenario, ConfigError> {
        let err = |field: &str, e: photomech_core::Error| ConfigError { field: field.into(), line: None, message: e.to_string() };
        let mesh = Mesh::new(self.geometry).map_err(|e| err("geometry", e))?;
        let mut model = Model::new(mesh, self.material, self.loads.load_case()).map_err(|e| err("material", e))?;
        let ini = &self.initial;
        let mut initial = affine_state(&model.mesh, ini.potential, ini.field, ini.order, ini.def_grad.unwrap_or(Mat3::IDENTITY));
        for (i, bc) in self.bcs.iter().enumerate() {
            let set = NodeSet::parse(&bc.boundary)
                .ok_or_else(|| ConfigError { field: format!("bcs[{i}].boundary"), line: None, message: "unknown boundary".into() })?;
            let value = bc.value.map(|v| match v {
                BcValue::Scalar(s) => DirichletValue::Potential(s),
                BcValue::Vector(u) => DirichletValue::Displacement(u),
                BcValue::Order(y) => DirichletValue::Order(y),
            });
            apply_dirichlet(&model.mesh, &mut model.layout, &mut initial.fields, set, bc.field, value)
                .map_err(|e| err(&format!("bcs[{i}]"), e))?;
        }
        Ok(Scenario { model, initial })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("configuration serializes")
    }
}

fn missing_field(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("missing field `")?;
    rest.split('`').next()
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Best-effort line of a dotted field path such as `solver.dt` or
/// `bcs[1].value`.
fn locate(text: &str, field: &str) -> Option<usize> {
    let mut parts: Vec<&str> = field.split('.').filter(|s| !s.is_empty()).collect();
    let key = if parts.len() > 1 { parts.pop() } else { None };
    let lines: Vec<&str> = text.lines().collect();
    let mut start = 0;
    if let Some(table) = parts.first() {
        let (name, index) = match table.split_once('[') {
            Some((n, i)) => (n, i.trim_end_matches(']').parse::<usize>().ok()),
            None => (*table, None),
        };
        let header = |l: &str| {
            let t = l.trim();
            match index {
                Some(_) => t == format!("[[{name}]]"),
                None => t == format!("[{name}]") || t.starts_with(&format!("{name} =")) || t.starts_with(&format!("{name}=")),
            }
        };
        let hits: Vec<usize> = lines.iter().enumerate().filter(|(_, l)| header(l)).map(|(i, _)| i).collect();
        start = *hits.get(index.unwrap_or(0))?;
        if key.is_none() {
            return Some(start + 1);
        }
    }
    let key = key.or(parts.first().copied())?;
    lines
        .iter()
        .enumerate()
        .skip(start)
        .take_while(|(i, l)| *i == start || !l.trim_start().starts_with('['))
        .find(|(_, l)| {
            let t = l.trim_start();
            t.strip_prefix(key).is_some_and(|r| r.trim_start().starts_with('='))
        })
        .map(|(i, _)| i + 1)
        .or(Some(start + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "cube"

[geometry]
extents = [1.0, 1.0, 1.0]
cells = [1, 1, 1]

[solver]
formulation = "dirichlet"
dt = 0.5
t_end = 1.0
"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = ScenarioConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.units, DEFAULT_UNITS);
        assert_eq!(cfg.outputs.snapshot_stride, 1);
        assert_eq!(cfg.material, MaterialParams::default());
        let sc = cfg.build().unwrap();
        assert_eq!(sc.model.n_dofs(), 80);
    }

    #[test]
    fn missing_field_is_named_with_line() {
        let text = MINIMAL.replace("dt = 0.5\n", "");
        let err = ScenarioConfig::parse(&text).unwrap_err();
        assert_eq!(err.field, "solver.dt");
        assert_eq!(err.line, Some(8));
    }

    #[test]
    fn bad_value_reports_line() {
        let text = MINIMAL.replace("dt = 0.5", "dt = -0.5");
        let err = ScenarioConfig::parse(&text).unwrap_err();
        assert_eq!(err.field, "solver");
        assert_eq!(err.line, Some(8));
        let text = MINIMAL.replace("t_end = 1.0", "t_end = \"soon\"");
        let err = ScenarioConfig::parse(&text).unwrap_err();
        assert_eq!(err.field, "solver.t_end");
        assert_eq!(err.line, Some(11));
    }

    #[test]
    fn unknown_key_rejected() {
        let text = MINIMAL.replace("dt = 0.5", "dt = 0.5\nstep = 3");
        assert!(ScenarioConfig::parse(&text).is_err());
    }

    #[test]
    fn boundary_value_must_match_field() {
        let text = format!("{MINIMAL}\n[[bcs]]\nboundary = \"matter:-x\"\nfield = \"potential\"\nvalue = [0.0, 0.0, 0.0]\n");
        let err = ScenarioConfig::parse(&text).unwrap_err();
        assert_eq!(err.field, "bcs[0].value");
        assert_eq!(err.line, Some(16));
    }

    #[test]
    fn echo_round_trips() {
        let text = format!(
            "{MINIMAL}\n[loads]\nprofile = {{ kind = \"ramp\", duration = 2.0 }}\n[[loads.surface]]\nfaces = [\"+x\"]\nfree_charge = 0.3\n[[bcs]]\nboundary = \"matter:-x\"\nfield = \"placement\"\nvalue = [0.0, 0.0, 0.0]\n[[bcs]]\nboundary = \"matter\"\nfield = \"electronic\"\nvalue = {{ trans = [0.1, 0.0, 0.0], cis = [0.0, 0.0, 0.0] }}\n"
        );
        let cfg = ScenarioConfig::parse(&text).unwrap();
        assert_eq!(cfg.loads.surface[0].loads.free_charge, 0.3);
        assert!(matches!(cfg.bcs[1].value, Some(BcValue::Order(_))));
        let again = ScenarioConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg);
    }
}
