//! Simulation report parsing, tabular parameter extraction, and power-model
//! input templating.

use crate::ini;
use crate::orchestrate::JobResult;
use indexmap::IndexMap;
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Power-model input template shipped with the tool.
pub const DEFAULT_POWER_TEMPLATE: &str = include_str!("../resources/power_template.xml");
/// Placeholder-to-statistic mapping for the shipped template.
pub const DEFAULT_POWER_MAPPING: &str = include_str!("../resources/power_mapping.ini");
/// Sample architectural report used as the stub backend's default output.
pub const SAMPLE_ARCH_REPORT: &str = include_str!("../resources/fixtures/arch_report.ini");

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report has no recognizable section structure")]
    UnparseableReport,
    #[error("statistic '{selector}' for placeholder '{placeholder}' is missing from the report")]
    MissingStatistic { placeholder: String, selector: String },
    #[error("template placeholder '@{{{0}}}' has no mapping")]
    UnboundPlaceholder(String),
    #[error("malformed template: {0}")]
    MalformedTemplate(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

/// One report value. Numeric-looking values become numbers; everything else
/// passes through as text, no unit conversion.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Scalar {
    pub fn parse(raw: &str) -> Scalar {
        if let Ok(i) = raw.parse::<i64>() {
            return Scalar::Int(i);
        }
        if let Ok(f) = raw.parse::<f64>() {
            if f.is_finite() {
                return Scalar::Real(f);
            }
        }
        Scalar::Text(raw.to_string())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Scalar::Int(i) => Some(*i as f64),
            Scalar::Real(f) => Some(*f),
            Scalar::Text(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(i) => write!(f, "{i}"),
            Scalar::Real(r) => write!(f, "{r}"),
            Scalar::Text(t) => f.write_str(t),
        }
    }
}

/// Which pipeline stage produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportStage {
    Architectural,
    Power,
}

impl fmt::Display for ReportStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportStage::Architectural => "architectural",
            ReportStage::Power => "power",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportSource {
    pub topology: String,
    pub benchmark: String,
    pub stage: ReportStage,
}

/// Sectioned key/value statistics, order-preserving.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricReport {
    pub source: Option<ReportSource>,
    pub sections: IndexMap<String, IndexMap<String, Scalar>>,
}

impl MetricReport {
    pub fn get(&self, section: &str, key: &str) -> Option<&Scalar> {
        self.sections.get(section).and_then(|s| s.get(key))
    }

    pub fn set(&mut self, section: &str, key: &str, value: Scalar) {
        self.sections.entry(section.to_string()).or_default().insert(key.to_string(), value);
    }

    /// Serializes back to the INI-style report surface.
    pub fn to_text(&self) -> String {
        let mut doc = ini::Ini::default();
        for (name, entries) in &self.sections {
            let mut section = ini::Section::new(name.clone());
            for (key, value) in entries {
                section.set(key.clone(), value.to_string());
            }
            doc.sections.push(section);
        }
        doc.to_text()
    }
}

/// Parses INI-style simulator statistics. Unknown keys and non-numeric
/// values are preserved; the only failure is the complete absence of
/// section structure.
pub fn parse_stats_report(text: &str) -> Result<MetricReport, ReportError> {
    let parsed = ini::parse(text);
    let mut report = MetricReport::default();
    for section in &parsed.sections {
        if section.name.is_empty() {
            continue;
        }
        let entries = report.sections.entry(section.name.clone()).or_default();
        for (key, value) in &section.entries {
            entries.insert(key.clone(), Scalar::parse(value));
        }
    }
    if report.sections.is_empty() {
        return Err(ReportError::UnparseableReport);
    }
    Ok(report)
}

/// Dotted `Section.Key` path with an optional output column alias.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selector {
    pub path: String,
    pub alias: Option<String>,
}

impl Selector {
    pub fn new(path: impl Into<String>) -> Self {
        Selector { path: path.into(), alias: None }
    }

    pub fn with_alias(path: impl Into<String>, alias: impl Into<String>) -> Self {
        Selector { path: path.into(), alias: Some(alias.into()) }
    }

    /// Parses `Section.Key` or `Section.Key as Alias`.
    pub fn parse(line: &str) -> Selector {
        match line.rsplit_once(" as ") {
            Some((path, alias)) if !alias.trim().is_empty() => {
                Selector::with_alias(path.trim(), alias.trim())
            }
            _ => Selector::new(line.trim()),
        }
    }

    pub fn column_name(&self) -> &str {
        self.alias.as_deref().unwrap_or(&self.path)
    }

    /// Resolves against a report. Section names may contain dots, so the
    /// longest section name that prefixes the path wins.
    pub fn resolve<'r>(&self, report: &'r MetricReport) -> Option<&'r Scalar> {
        let mut best: Option<(&str, &str)> = None;
        for name in report.sections.keys() {
            if let Some(rest) = self.path.strip_prefix(name.as_str()) {
                if let Some(key) = rest.strip_prefix('.') {
                    if best.is_none_or(|(b, _)| name.len() > b.len()) {
                        best = Some((name.as_str(), key));
                    }
                }
            }
        }
        let (section, key) = best?;
        report.get(section, key)
    }
}

/// Loads a selector list: one dotted path per line, optional ` as Alias`,
/// `#` comments and blanks skipped.
pub fn load_selectors(text: &str) -> Vec<Selector> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(Selector::parse)
        .collect()
}

pub type Cell = Option<Scalar>;

/// Extraction result: a header row plus one row per job.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

/// Builds one row per job: identity columns, status, the probe value for
/// early-terminated jobs, then one column per selector. Missing values are
/// empty cells; rows are never dropped.
pub fn extract_params(results: &[JobResult], selectors: &[Selector]) -> Table {
    let mut columns = vec![
        "topology".to_string(),
        "benchmark".to_string(),
        "status".to_string(),
        "probe_value".to_string(),
    ];
    columns.extend(selectors.iter().map(|s| s.column_name().to_string()));

    let mut rows = Vec::with_capacity(results.len());
    for result in results {
        let mut row: Vec<Cell> = vec![
            Some(Scalar::Text(result.topology.clone())),
            Some(Scalar::Text(result.benchmark.clone())),
            Some(Scalar::Text(result.status.to_string())),
            result.probe_value.map(Scalar::Real),
        ];
        for selector in selectors {
            let hit = result.reports.iter().find_map(|r| selector.resolve(r));
            row.push(hit.cloned());
        }
        rows.push(row);
    }
    Table { columns, rows }
}

fn csv_field(text: &str) -> String {
    if text.contains(',') || text.contains('"') || text.contains('\n') || text.contains('\r') {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// Renders the fixed CSV dialect: comma separators, double-quote escaping,
/// LF line endings, header row first.
pub fn render_csv(table: &Table) -> String {
    let mut out = String::new();
    let header: Vec<String> = table.columns.iter().map(|c| csv_field(c)).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in &table.rows {
        let fields: Vec<String> = row
            .iter()
            .map(|cell| cell.as_ref().map_or(String::new(), |s| csv_field(&s.to_string())))
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(table: &Table, destination: &Path) -> Result<(), ReportError> {
    std::fs::write(destination, render_csv(table))?;
    Ok(())
}

/// Plain-text rendering with aligned columns.
pub fn render_txt(table: &Table) -> String {
    let mut widths: Vec<usize> = table.columns.iter().map(String::len).collect();
    let mut text_rows: Vec<Vec<String>> = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let cells: Vec<String> =
            row.iter().map(|c| c.as_ref().map_or(String::new(), |s| s.to_string())).collect();
        for (i, cell) in cells.iter().enumerate() {
            if i < widths.len() {
                widths[i] = widths[i].max(cell.len());
            }
        }
        text_rows.push(cells);
    }
    let mut out = String::new();
    let render_row = |cells: &[String], widths: &[usize]| {
        let padded: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:width$}", c, width = widths.get(i).copied().unwrap_or(0)))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    out.push_str(&render_row(&table.columns, &widths));
    out.push('\n');
    for cells in &text_rows {
        out.push_str(&render_row(cells, &widths));
        out.push('\n');
    }
    out
}

pub fn write_txt(table: &Table, destination: &Path) -> Result<(), ReportError> {
    std::fs::write(destination, render_txt(table))?;
    Ok(())
}

/// Loads a placeholder mapping: `name = Section.Key` lines, any sections.
pub fn load_power_mapping(text: &str) -> Vec<(String, Selector)> {
    let parsed = ini::parse(text);
    let mut out = Vec::new();
    for section in &parsed.sections {
        for (key, value) in &section.entries {
            if !value.is_empty() {
                out.push((key.clone(), Selector::new(value.clone())));
            }
        }
    }
    out
}

fn scan_placeholders(template: &str) -> Result<Vec<String>, ReportError> {
    let mut names = Vec::new();
    let mut rest = template;
    while let Some(start) = rest.find("@{") {
        let after = &rest[start + 2..];
        let end = after.find('}').ok_or_else(|| {
            ReportError::MalformedTemplate("unterminated '@{' placeholder".to_string())
        })?;
        let name = &after[..end];
        if name.is_empty() {
            return Err(ReportError::MalformedTemplate("empty placeholder name".to_string()));
        }
        if !names.iter().any(|n| n == name) {
            names.push(name.to_string());
        }
        rest = &after[end + 1..];
    }
    Ok(names)
}

/// Replaces every `@{name}` in the template with the mapped statistic.
/// Fails closed: all placeholders are resolved before any text is produced.
pub fn fill_power_template(
    report: &MetricReport,
    mapping: &[(String, Selector)],
    template: &str,
) -> Result<String, ReportError> {
    let placeholders = scan_placeholders(template)?;
    let mut resolved: Vec<(String, String)> = Vec::with_capacity(placeholders.len());
    for name in &placeholders {
        let selector = mapping
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| ReportError::UnboundPlaceholder(name.clone()))?;
        let value =
            selector.resolve(report).ok_or_else(|| ReportError::MissingStatistic {
                placeholder: name.clone(),
                selector: selector.path.clone(),
            })?;
        resolved.push((format!("@{{{name}}}"), value.to_string()));
    }
    let mut out = template.to_string();
    for (needle, value) in &resolved {
        out = out.replace(needle, value);
    }
    Ok(out)
}
