use super::config::ConfigDocument;

const GENERIC: &[(&str, &str)] = &[
    ("generic-0-data-classes.json", include_str!("../../presets/generic-0-data-classes.json")),
    ("generic-1-globally-accessible.json", include_str!("../../presets/generic-1-globally-accessible.json")),
    ("generic-2-collections.json", include_str!("../../presets/generic-2-collections.json")),
    ("generic-3-ctor-params.json", include_str!("../../presets/generic-3-ctor-params.json")),
    ("generic-4-java-language.json", include_str!("../../presets/generic-4-java-language.json")),
    ("generic-5-creational.json", include_str!("../../presets/generic-5-creational.json")),
];

const JHOTDRAW: &[(&str, &str)] = &[
    ("jhotdraw-6-selection.json", include_str!("../../presets/jhotdraw-6-selection.json")),
    ("jhotdraw-7-project.json", include_str!("../../presets/jhotdraw-7-project.json")),
    ("jhotdraw-8-temporary.json", include_str!("../../presets/jhotdraw-8-temporary.json")),
];

/// Names accepted by [`preset_documents`]. `jhotdraw` includes `generic`.
pub const PRESETS: &[&str] = &["generic", "jhotdraw"];

pub fn preset_documents(name: &str) -> Option<Vec<ConfigDocument>> {
    let parts: &[&[(&str, &str)]] = match name {
        "generic" => &[GENERIC],
        "jhotdraw" => &[GENERIC, JHOTDRAW],
        _ => return None,
    };
    Some(
        parts
            .iter()
            .flat_map(|p| p.iter())
            .map(|(file, text)| ConfigDocument { name: format!("preset:{file}"), text: text.to_string() })
            .collect(),
    )
}
