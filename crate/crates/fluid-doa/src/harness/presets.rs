//! Shipped experiment presets, embedded from `presets/`.

/// Preset names and their TOML sources.
const PRESETS: &[(&str, &str)] = &[
    ("fig3", include_str!("../../presets/fig3.toml")),
    ("fig6a", include_str!("../../presets/fig6a.toml")),
    ("fig6b", include_str!("../../presets/fig6b.toml")),
    ("fig6c", include_str!("../../presets/fig6c.toml")),
    ("fig6d", include_str!("../../presets/fig6d.toml")),
    ("fig8a", include_str!("../../presets/fig8a.toml")),
    ("fig8b", include_str!("../../presets/fig8b.toml")),
    ("fig9", include_str!("../../presets/fig9.toml")),
    ("fig9dense", include_str!("../../presets/fig9dense.toml")),
    ("fig10ars", include_str!("../../presets/fig10ars.toml")),
    ("fig10nars", include_str!("../../presets/fig10nars.toml")),
];

/// TOML source of a named preset.
pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

/// All shipped preset names.
pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ExperimentConfig;

    #[test]
    fn every_preset_parses_and_validates() {
        for name in preset_names() {
            let text = preset(name).unwrap();
            let cfg = ExperimentConfig::from_toml(text)
                .unwrap_or_else(|e| panic!("preset {name}: {e}"));
            cfg.validate().unwrap_or_else(|e| panic!("preset {name}: {e}"));
        }
    }

    #[test]
    fn unknown_preset_is_none() {
        assert!(preset("fig99").is_none());
    }
}
