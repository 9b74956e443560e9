mod cutoff;
mod glue;
#[cfg(test)]
mod tests;

pub use cutoff::{build_cutoff, radial_cutoff_check, smooth_step_jet, step_bound, Cutoff, RadialCutoffReport};
pub use glue::{
    annulus_scan, blend, blend_defect, convexity_defect, glue_metrics, glued_positivity_demo, jet_defect,
    scene_metrics, GluingAttempt, GluingReport, GluingScene, RadialFn, SceneMetrics,
};
