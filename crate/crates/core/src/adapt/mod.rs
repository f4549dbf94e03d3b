//! Layered adaptation rules that widen friend sets, and attribution of each
//! silenced violation to the layer and rule responsible.

mod config;
mod engine;
mod presets;

pub use config::{
    load_config, resolve_type_names, CallMatcher, unknown_type_warnings, ConfigDocument, ConfigError, FieldElement, GrantStatus, Hint,
    HintRule, Layer, LayeredConfig, Rule, RuleKind, CONFIG_SCHEMA,
};
pub use engine::{
    attribute_waterfall, classify_all, site_order, Adapter, ExplainStep, Explanation, LayerTally, Outcome, RemainingStatus,
    RuleTally, Verdict, Waterfall,
};
pub use presets::{preset_documents, PRESETS};
