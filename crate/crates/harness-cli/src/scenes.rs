//! The built-in traffic scenes and scene lookup.

use std::path::Path;

use sim_core::{generate_perturbations, scenes, PerturbationSpec, Scene};

use crate::error::{HarnessError, Result};
use crate::fsutil::read_json;

/// Right-turn and Crossing, validated.
pub fn build_scenes() -> Vec<Scene> {
    let all = scenes::builtin_scenes();
    for s in &all {
        s.validate().expect("built-in scenes are valid");
    }
    all
}

/// A built-in scene id, or a path to a scene JSON file.
pub fn resolve_scene(name: &str) -> Result<Scene> {
    if let Some(scene) = scenes::builtin(name) {
        return Ok(scene);
    }
    let path = Path::new(name);
    if !path.is_file() {
        let ids: Vec<String> = build_scenes().into_iter().map(|s| s.id).collect();
        return Err(HarnessError::Invalid(format!(
            "unknown scene `{name}`: use one of {} or a scene JSON file",
            ids.join(", ")
        )));
    }
    let scene: Scene = read_json(path).map_err(|e| HarnessError::Invalid(e.to_string()))?;
    scene
        .validate()
        .map_err(|e| HarnessError::Invalid(format!("{}: {e}", path.display())))?;
    Ok(scene)
}

/// Checks a scene and that `count` perturbed layouts can be drawn from it.
pub fn validate_scene(scene: &Scene, spec: &PerturbationSpec, count: usize, seed: u64) -> Result<()> {
    scene
        .validate()
        .map_err(|e| HarnessError::Invalid(format!("scene `{}`: {e}", scene.id)))?;
    let layouts = generate_perturbations(scene, spec, count, seed)
        .map_err(|e| HarnessError::Invalid(format!("scene `{}`: {e}", scene.id)))?;
    debug_assert!(layouts.iter().all(|s| scene.is_valid_state(s)));
    Ok(())
}
