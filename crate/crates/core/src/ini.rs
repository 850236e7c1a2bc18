//! Minimal ordered INI reader/writer shared by the config, report, plan,
//! profile, and scenario file formats.
//!
//! Sections are `[Name]` headers; entries are `Key = Value` with the first
//! `=` as the separator. Full-line comments start with `#` or `;`. Order
//! and duplicate sections are preserved. Lines without `=` inside a section
//! are kept as entries with an empty value so nothing is silently dropped.

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ini {
    pub sections: Vec<Section>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub entries: Vec<(String, String)>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Section { name: name.into(), entries: Vec::new() }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push((key.into(), value.into()));
    }
}

impl Ini {
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.section(section).and_then(|s| s.get(key))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, section) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("[{}]\n", section.name));
            for (k, v) in &section.entries {
                if v.is_empty() {
                    out.push_str(&format!("{k}\n"));
                } else {
                    out.push_str(&format!("{k} = {v}\n"));
                }
            }
        }
        out
    }
}

/// Parses INI-ish text. Entries before the first section header land in a
/// section with an empty name. Never fails.
pub fn parse(text: &str) -> Ini {
    let mut ini = Ini::default();
    let mut current: Option<Section> = None;
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            if let Some(done) = current.take() {
                ini.sections.push(done);
            }
            current = Some(Section::new(line[1..line.len() - 1].trim()));
            continue;
        }
        let section = current.get_or_insert_with(|| Section::new(""));
        match line.split_once('=') {
            Some((k, v)) => section.set(k.trim(), v.trim()),
            None => section.set(line, ""),
        }
    }
    if let Some(done) = current.take() {
        ini.sections.push(done);
    }
    ini
}
