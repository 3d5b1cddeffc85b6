//! Configuration documents: the suite config, product specs referencing
//! factor space-spec files, and field-precise validation errors.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::{Deserialize, Serialize};

use hypro_core::product::{Flavor, Mode, ProductSpec};
use hypro_core::space::Space;
use hypro_core::Error as CoreError;

/// A product-spec document: two factor files plus mode/flavor/ε/mesh.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductSpecDoc {
    pub label: String,
    pub factor1: String,
    pub factor2: String,
    pub mode: Mode,
    pub flavor: Flavor,
    pub epsilon: f64,
    pub mesh: f64,
    /// Fixture knowledge for the boundary check, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_boundary_classes: Option<usize>,
    /// Basepoint for ray classification; defaults to the minimal-level
    /// node in basepoint mode and the median-level node in Busemann mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_z: Option<hypro_core::product::YPoint>,
}

/// A loaded product: both factors plus the core spec.
pub struct LoadedProduct {
    pub doc: ProductSpecDoc,
    pub factor1: Space,
    pub factor2: Space,
    pub spec: ProductSpec,
}

pub fn load_product_spec(path: &Path) -> anyhow::Result<LoadedProduct> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read product spec {}", path.display()))?;
    let doc: ProductSpecDoc = serde_json::from_str(&text)
        .with_context(|| format!("invalid product spec {}", path.display()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let f1_path = base.join(&doc.factor1);
    let f2_path = base.join(&doc.factor2);
    let factor1 =
        Space::from_file(&f1_path).map_err(|e| anyhow!("factor1 {}: {e}", f1_path.display()))?;
    let factor2 =
        Space::from_file(&f2_path).map_err(|e| anyhow!("factor2 {}: {e}", f2_path.display()))?;
    let spec = ProductSpec {
        label: doc.label.clone(),
        mode: doc.mode.clone(),
        flavor: doc.flavor,
        epsilon: doc.epsilon,
        mesh: doc.mesh,
    };
    Ok(LoadedProduct {
        doc,
        factor1,
        factor2,
        spec,
    })
}

/// Sampling knobs with their defaults.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleSizes {
    #[serde(default = "d_delta")]
    pub delta_points: usize,
    #[serde(default = "d_triangles")]
    pub triangle_trials: usize,
    #[serde(default = "d_tcheck")]
    pub tcheck_trials: usize,
    #[serde(default = "d_pairs")]
    pub product_pairs: usize,
    #[serde(default = "d_pdelta")]
    pub product_delta_points: usize,
    #[serde(default = "d_mech")]
    pub mechanism_probes: usize,
    #[serde(default = "d_rays")]
    pub boundary_rays: usize,
    #[serde(default = "d_k")]
    pub boundary_k: usize,
    #[serde(default = "d_morse")]
    pub morse_detours: usize,
}

fn d_delta() -> usize {
    200
}
fn d_triangles() -> usize {
    40
}
fn d_tcheck() -> usize {
    50
}
fn d_pairs() -> usize {
    100
}
fn d_pdelta() -> usize {
    64
}
fn d_mech() -> usize {
    4
}
fn d_rays() -> usize {
    6
}
fn d_k() -> usize {
    16
}
fn d_morse() -> usize {
    8
}

impl Default for SampleSizes {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

/// The suite configuration document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub output: PathBuf,
    #[serde(default)]
    pub spaces: Vec<PathBuf>,
    #[serde(default)]
    pub products: Vec<PathBuf>,
    /// Which check groups run; empty means all.
    #[serde(default)]
    pub operations: Vec<String>,
    #[serde(default)]
    pub samples: SampleSizes,
    /// Base directory for relative paths (set while loading).
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl SuiteConfig {
    pub fn runs(&self, group: &str) -> bool {
        self.operations.is_empty() || self.operations.iter().any(|o| o == group)
    }

    pub fn space_paths(&self) -> Vec<PathBuf> {
        self.spaces.iter().map(|p| self.base_dir.join(p)).collect()
    }

    pub fn product_paths(&self) -> Vec<PathBuf> {
        self.products
            .iter()
            .map(|p| self.base_dir.join(p))
            .collect()
    }
}

const KNOWN_OPERATIONS: [&str; 5] = ["space", "hyperbolicity", "busemann", "morse", "product"];

/// Load and validate a suite config, reporting every offending field.
pub fn load_config(path: &Path) -> Result<SuiteConfig, CoreError> {
    let text = std::fs::read_to_string(path)?;
    let raw: serde_json::Value = serde_json::from_str(&text)?;
    let mut errors: Vec<String> = Vec::new();

    let obj = match raw.as_object() {
        Some(o) => o,
        None => {
            return Err(CoreError::Schema(vec![
                "config: top level must be an object".into(),
            ]))
        }
    };
    if !obj.contains_key("seed") {
        errors.push("seed: required field is missing".into());
    } else if !obj["seed"].is_u64() {
        errors.push("seed: must be an unsigned integer".into());
    }
    if !obj.contains_key("output") {
        errors.push("output: required field is missing".into());
    } else if !obj["output"].is_string() {
        errors.push("output: must be a path string".into());
    }
    for key in ["spaces", "products", "operations"] {
        if let Some(v) = obj.get(key) {
            if !v.is_array() {
                errors.push(format!("{key}: must be an array"));
            }
        }
    }
    if let Some(ops) = obj.get("operations").and_then(|v| v.as_array()) {
        for op in ops {
            match op.as_str() {
                Some(s) if KNOWN_OPERATIONS.contains(&s) => {}
                Some(s) => errors.push(format!(
                    "operations: unknown group `{s}` (known: {})",
                    KNOWN_OPERATIONS.join(", ")
                )),
                None => errors.push("operations: entries must be strings".into()),
            }
        }
    }
    if !errors.is_empty() {
        return Err(CoreError::Schema(errors));
    }

    let mut config: SuiteConfig = serde_json::from_value(raw)?;
    config.base_dir = path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .to_path_buf();

    // Referenced files must exist and validate.
    for p in config.space_paths() {
        if !p.exists() {
            errors.push(format!("spaces: file not found: {}", p.display()));
        } else if let Err(e) = Space::from_file(&p) {
            errors.push(format!("spaces: {}: {e}", p.display()));
        }
    }
    for p in config.product_paths() {
        if !p.exists() {
            errors.push(format!("products: file not found: {}", p.display()));
        } else if let Err(e) = load_product_spec(&p) {
            errors.push(format!("products: {}: {e}", p.display()));
        }
    }
    if !errors.is_empty() {
        return Err(CoreError::Schema(errors));
    }
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(name: &str, contents: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("hypro-config-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        std::fs::write(&path, contents).unwrap();
        path
    }

    #[test]
    fn minimal_config_loads() {
        let p = write_temp("ok.json", r#"{"seed": 7, "output": "out.jsonl"}"#);
        let c = load_config(&p).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.samples.delta_points, 200);
        assert!(c.runs("space"));
    }

    #[test]
    fn missing_seed_is_named() {
        let p = write_temp("noseed.json", r#"{"output": "out.jsonl"}"#);
        match load_config(&p) {
            Err(CoreError::Schema(errs)) => {
                assert!(errs.iter().any(|e| e.starts_with("seed")), "{errs:?}")
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn dangling_space_path_is_named() {
        let p = write_temp(
            "dangling.json",
            r#"{"seed": 1, "output": "o.jsonl", "spaces": ["nope.json"]}"#,
        );
        match load_config(&p) {
            Err(CoreError::Schema(errs)) => {
                assert!(errs.iter().any(|e| e.contains("nope.json")), "{errs:?}")
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }
}
