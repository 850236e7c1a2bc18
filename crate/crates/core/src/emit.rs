//! Config emission: serializes a validated graph into memory-hierarchy and
//! interconnect-network INI files, with per-component-class line accounting.

use crate::graph::{ArchGraph, ComponentId, ComponentKind, Connection, Stream};
use crate::ini;
use crate::topo::CacheRole;
use crate::validate::{validate_graph, ValidationReport};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("graph failed validation, emit refused:\n{0}")]
    UnvalidatedGraph(ValidationReport),
    #[error("invalid cache profile: {0}")]
    ProfileInvalid(String),
}

/// Geometry and timing for one cache level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelProfile {
    pub sets: u32,
    pub assoc: u32,
    pub block_size: u32,
    pub latency: u32,
    pub policy: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkProfile {
    pub buffer_size: u32,
    pub bandwidth: u32,
    pub lanes: u32,
}

/// Simulation-specific properties filled in around the generated structure.
/// The defaults are tool defaults, overridable through a profile file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheProfile {
    pub levels: [LevelProfile; 3],
    pub memory_latency: u32,
    pub memory_block_size: u32,
    pub network: NetworkProfile,
}

impl Default for CacheProfile {
    fn default() -> Self {
        let level = |sets, assoc, latency| LevelProfile {
            sets,
            assoc,
            block_size: 64,
            latency,
            policy: "LRU".to_string(),
        };
        CacheProfile {
            // 32 KiB 4-way, 256 KiB 8-way, 2 MiB 16-way at 64 B blocks.
            levels: [level(128, 4, 2), level(512, 8, 10), level(2048, 16, 30)],
            memory_latency: 200,
            memory_block_size: 64,
            network: NetworkProfile { buffer_size: 1024, bandwidth: 256, lanes: 2 },
        }
    }
}

impl CacheProfile {
    pub fn validate(&self) -> Result<(), EmitError> {
        for (i, level) in self.levels.iter().enumerate() {
            let name = format!("L{}", i + 1);
            if level.sets == 0 || level.assoc == 0 || level.latency == 0 {
                return Err(EmitError::ProfileInvalid(format!(
                    "{name}: sets, associativity and latency must be positive"
                )));
            }
            if !level.block_size.is_power_of_two() {
                return Err(EmitError::ProfileInvalid(format!(
                    "{name}: block size {} is not a power of two",
                    level.block_size
                )));
            }
            if level.policy.is_empty() {
                return Err(EmitError::ProfileInvalid(format!("{name}: empty policy")));
            }
        }
        if self.memory_latency == 0 || !self.memory_block_size.is_power_of_two() {
            return Err(EmitError::ProfileInvalid("bad memory latency or block size".into()));
        }
        let net = &self.network;
        if net.buffer_size == 0 || net.bandwidth == 0 || net.lanes == 0 {
            return Err(EmitError::ProfileInvalid("network parameters must be positive".into()));
        }
        Ok(())
    }

    /// Loads overrides from an INI profile; missing keys keep defaults.
    pub fn from_ini(text: &str) -> Result<CacheProfile, EmitError> {
        let parsed = ini::parse(text);
        let mut profile = CacheProfile::default();
        let num = |section: &str, key: &str, current: u32| -> Result<u32, EmitError> {
            match parsed.get(section, key) {
                Some(raw) => raw.parse().map_err(|_| {
                    EmitError::ProfileInvalid(format!("[{section}] {key} = {raw} is not a number"))
                }),
                None => Ok(current),
            }
        };
        for (i, name) in ["L1", "L2", "L3"].iter().enumerate() {
            let level = &mut profile.levels[i];
            level.sets = num(name, "Sets", level.sets)?;
            level.assoc = num(name, "Assoc", level.assoc)?;
            level.block_size = num(name, "BlockSize", level.block_size)?;
            level.latency = num(name, "Latency", level.latency)?;
            if let Some(policy) = parsed.get(name, "Policy") {
                level.policy = policy.to_string();
            }
        }
        profile.memory_latency = num("Memory", "Latency", profile.memory_latency)?;
        profile.memory_block_size = num("Memory", "BlockSize", profile.memory_block_size)?;
        profile.network.buffer_size = num("Network", "BufferSize", profile.network.buffer_size)?;
        profile.network.bandwidth = num("Network", "Bandwidth", profile.network.bandwidth)?;
        profile.network.lanes = num("Network", "Lanes", profile.network.lanes)?;
        profile.validate()?;
        Ok(profile)
    }
}

/// Line-accounting buckets, one per component class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LocClass {
    CoreEntry,
    L1,
    L2L3,
    Memory,
    Geometry,
    Connection,
    Switch,
}

impl fmt::Display for LocClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LocClass::CoreEntry => "core-entry",
            LocClass::L1 => "l1",
            LocClass::L2L3 => "l2-l3",
            LocClass::Memory => "memory",
            LocClass::Geometry => "geometry",
            LocClass::Connection => "connection",
            LocClass::Switch => "switch",
        })
    }
}

/// Emitted configuration pair plus its line breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigBundle {
    pub mem_config: String,
    pub net_config: String,
    pub loc_breakdown: BTreeMap<LocClass, usize>,
}

impl ConfigBundle {
    /// Non-blank line counts attributed to component classes; the buckets
    /// partition both emitted texts.
    pub fn loc_report(&self) -> &BTreeMap<LocClass, usize> {
        &self.loc_breakdown
    }

    pub fn total_loc(&self) -> usize {
        self.loc_breakdown.values().sum()
    }
}

struct SectionWriter {
    text: String,
    loc: BTreeMap<LocClass, usize>,
}

impl SectionWriter {
    fn new() -> Self {
        SectionWriter { text: String::new(), loc: BTreeMap::new() }
    }

    fn section(&mut self, class: LocClass, header: &str, entries: &[(&str, String)]) {
        if !self.text.is_empty() {
            self.text.push('\n');
        }
        self.text.push_str(&format!("[{header}]\n"));
        for (key, value) in entries {
            self.text.push_str(&format!("{key} = {value}\n"));
        }
        *self.loc.entry(class).or_insert(0) += 1 + entries.len();
    }
}

fn cache_class_name(level: u8, role: CacheRole) -> String {
    format!("{}{}", role.token_prefix().to_lowercase(), level)
}

fn module_name(graph: &ArchGraph, id: ComponentId) -> String {
    format!("mod-{}", graph.name(id))
}

fn loc_class_of_cache(level: u8) -> LocClass {
    if level == 1 {
        LocClass::L1
    } else {
        LocClass::L2L3
    }
}

/// Landing component a switch chain delivers to.
fn switch_landing(graph: &ArchGraph, switch: ComponentId) -> Option<ComponentId> {
    let mut current = switch;
    for _ in 0..=graph.components.len() {
        let ups = graph.upward(current);
        let up = ups.first()?.upper;
        if matches!(graph.component(up).kind, ComponentKind::Switch(_)) {
            current = up;
        } else {
            return Some(up);
        }
    }
    None
}

/// Name of the network a connection belongs to: a point-to-point network
/// for plain edges, the landing's bus for switch-network edges.
fn net_name(graph: &ArchGraph, conn: &Connection) -> String {
    if conn.stream == Stream::Network {
        let landing = if matches!(graph.component(conn.upper).kind, ComponentKind::Switch(_)) {
            switch_landing(graph, conn.upper)
        } else {
            Some(conn.upper)
        };
        match landing {
            Some(id) => format!("bus-{}", graph.name(id)),
            None => "bus-unresolved".to_string(),
        }
    } else {
        format!("net-{}--{}", graph.name(conn.lower), graph.name(conn.upper))
    }
}

fn emit_all(graph: &ArchGraph, profile: &CacheProfile) -> Result<ConfigBundle, EmitError> {
    profile.validate()?;
    let report = validate_graph(graph, &graph.spec);
    if !report.ok() {
        return Err(EmitError::UnvalidatedGraph(report));
    }

    let mut mem = SectionWriter::new();
    let net_profile = &profile.network;

    // Cache geometries, one per (level, role) class present.
    for level in 1..=3u8 {
        for role in [CacheRole::Data, CacheRole::Instruction, CacheRole::Unified] {
            if graph.cache_family(level, role).is_empty() {
                continue;
            }
            let p = &profile.levels[(level - 1) as usize];
            mem.section(
                LocClass::Geometry,
                &format!("CacheGeometry geo-{}", cache_class_name(level, role)),
                &[
                    ("Sets", p.sets.to_string()),
                    ("Assoc", p.assoc.to_string()),
                    ("BlockSize", p.block_size.to_string()),
                    ("Latency", p.latency.to_string()),
                    ("Policy", p.policy.clone()),
                    ("Ports", "2".to_string()),
                ],
            );
        }
    }

    // Cache and memory modules in component-id order.
    for component in &graph.components {
        match component.kind {
            ComponentKind::Cache { level, role, .. } => {
                let up = graph.upward(component.id);
                let up = up.first().expect("validated cache has an uplink");
                let low_modules = match graph.component(up.upper).kind {
                    ComponentKind::Switch(_) => {
                        let landing = switch_landing(graph, up.upper)
                            .expect("validated switch chain lands");
                        module_name(graph, landing)
                    }
                    _ => module_name(graph, up.upper),
                };
                let mut entries = vec![
                    ("Type", "Cache".to_string()),
                    ("Geometry", format!("geo-{}", cache_class_name(level, role))),
                ];
                if level > 1 {
                    let first_in = graph
                        .incoming(component.id)
                        .first()
                        .map(|c| net_name(graph, c))
                        .expect("validated upper cache has children");
                    entries.push(("HighNetwork", first_in));
                }
                entries.push(("LowNetwork", net_name(graph, up)));
                entries.push(("LowModules", low_modules));
                mem.section(
                    loc_class_of_cache(level),
                    &format!("Module {}", module_name(graph, component.id)),
                    &entries,
                );
            }
            ComponentKind::MainMemory => {
                let first_in = graph
                    .incoming(component.id)
                    .first()
                    .map(|c| net_name(graph, c))
                    .expect("validated memory has children");
                mem.section(
                    LocClass::Memory,
                    &format!("Module {}", module_name(graph, component.id)),
                    &[
                        ("Type", "MainMemory".to_string()),
                        ("BlockSize", profile.memory_block_size.to_string()),
                        ("Latency", profile.memory_latency.to_string()),
                        ("HighNetwork", first_in),
                    ],
                );
            }
            _ => {}
        }
    }

    // One entry per core, naming its data and instruction modules.
    for &core in &graph.cores() {
        let ups = graph.upward(core);
        let serving = |wanted: Stream| {
            ups.iter()
                .find(|c| c.stream == wanted || c.stream == Stream::Both)
                .map(|c| module_name(graph, c.upper))
                .expect("validated core has stream parents")
        };
        let index = match graph.component(core).kind {
            ComponentKind::Core(i) => i,
            _ => unreachable!(),
        };
        mem.section(
            LocClass::CoreEntry,
            &format!("Entry {}", graph.name(core)),
            &[
                ("Arch", "x86".to_string()),
                ("Core", (index - 1).to_string()),
                ("Thread", "0".to_string()),
                ("DataModule", serving(Stream::Data)),
                ("InstModule", serving(Stream::Instruction)),
            ],
        );
    }

    // Network file: point-to-point declarations for plain connections,
    // then one bus per bypass landing with nodes, switch elements and links.
    let mut net = SectionWriter::new();
    let default_entries = [
        ("DefaultInputBufferSize", net_profile.buffer_size.to_string()),
        ("DefaultOutputBufferSize", net_profile.buffer_size.to_string()),
        ("DefaultBandwidth", net_profile.bandwidth.to_string()),
    ];
    for conn in &graph.connections {
        if conn.stream != Stream::Network {
            net.section(
                LocClass::Connection,
                &format!("Network {}", net_name(graph, conn)),
                &default_entries.clone().map(|(k, v)| (k, v)),
            );
        }
    }

    let mut landings: Vec<ComponentId> = Vec::new();
    for &sw in &graph.switches() {
        if let Some(landing) = switch_landing(graph, sw) {
            if !landings.contains(&landing) {
                landings.push(landing);
            }
        }
    }
    landings.sort();

    for &landing in &landings {
        let bus = format!("bus-{}", graph.name(landing));
        net.section(
            LocClass::Connection,
            &format!("Network {bus}"),
            &default_entries.clone().map(|(k, v)| (k, v)),
        );

        let bus_switches: Vec<ComponentId> = graph
            .switches()
            .into_iter()
            .filter(|&sw| switch_landing(graph, sw) == Some(landing))
            .collect();

        // End nodes: the landing itself, then every cache feeding the bus.
        let landing_class = match graph.component(landing).kind {
            ComponentKind::Cache { level, .. } => loc_class_of_cache(level),
            _ => LocClass::Memory,
        };
        net.section(
            landing_class,
            &format!("Network.{bus}.Node.{}", module_name(graph, landing)),
            &[("Type", "EndNode".to_string())],
        );
        for conn in &graph.connections {
            if conn.stream != Stream::Network || !bus_switches.contains(&conn.upper) {
                continue;
            }
            if let ComponentKind::Cache { level, .. } = graph.component(conn.lower).kind {
                net.section(
                    loc_class_of_cache(level),
                    &format!("Network.{bus}.Node.{}", module_name(graph, conn.lower)),
                    &[("Type", "EndNode".to_string())],
                );
            }
        }

        // Ring bus elements: switch node plus its upward ring segment.
        for &sw in &bus_switches {
            let name = graph.name(sw);
            net.section(
                LocClass::Switch,
                &format!("Network.{bus}.Node.{name}"),
                &[
                    ("Type", "Switch".to_string()),
                    ("InputBufferSize", net_profile.buffer_size.to_string()),
                    ("OutputBufferSize", net_profile.buffer_size.to_string()),
                    ("Bandwidth", net_profile.bandwidth.to_string()),
                    ("Lanes", net_profile.lanes.to_string()),
                    ("Arbitration", "RoundRobin".to_string()),
                    ("FixDelay", "1".to_string()),
                ],
            );
            let up = graph.upward(sw);
            let up = up.first().expect("validated switch has an uplink");
            let dest = match graph.component(up.upper).kind {
                ComponentKind::Switch(_) => graph.name(up.upper),
                _ => module_name(graph, up.upper),
            };
            net.section(
                LocClass::Switch,
                &format!("Network.{bus}.Link.{name}--{dest}"),
                &[
                    ("Source", name.clone()),
                    ("Dest", dest),
                    ("Type", "Bidirectional".to_string()),
                    ("Bandwidth", net_profile.bandwidth.to_string()),
                    ("Lanes", net_profile.lanes.to_string()),
                ],
            );
        }

        // Cache-to-switch links.
        for conn in &graph.connections {
            if conn.stream != Stream::Network || !bus_switches.contains(&conn.upper) {
                continue;
            }
            if matches!(graph.component(conn.lower).kind, ComponentKind::Cache { .. }) {
                let source = module_name(graph, conn.lower);
                let dest = graph.name(conn.upper);
                net.section(
                    LocClass::Connection,
                    &format!("Network.{bus}.Link.{source}--{dest}"),
                    &[
                        ("Source", source.clone()),
                        ("Dest", dest),
                        ("Type", "Bidirectional".to_string()),
                    ],
                );
            }
        }
    }

    let mut loc = mem.loc;
    for (class, lines) in net.loc {
        *loc.entry(class).or_insert(0) += lines;
    }
    Ok(ConfigBundle { mem_config: mem.text, net_config: net.text, loc_breakdown: loc })
}

/// Memory-hierarchy configuration text for a validated graph.
pub fn emit_mem_config(graph: &ArchGraph, profile: &CacheProfile) -> Result<String, EmitError> {
    Ok(emit_all(graph, profile)?.mem_config)
}

/// Interconnect-network configuration text for a validated graph.
pub fn emit_net_config(graph: &ArchGraph, profile: &CacheProfile) -> Result<String, EmitError> {
    Ok(emit_all(graph, profile)?.net_config)
}

/// Both configs plus the line breakdown in one pass.
pub fn emit_bundle(graph: &ArchGraph, profile: &CacheProfile) -> Result<ConfigBundle, EmitError> {
    emit_all(graph, profile)
}

/// Cross-checks that every reference inside an emitted bundle names a
/// section that exists; returns human-readable findings.
pub fn check_bundle_references(mem_config: &str, net_config: &str) -> Vec<String> {
    let mem = ini::parse(mem_config);
    let net = ini::parse(net_config);
    let mut findings = Vec::new();

    let geometries: Vec<&str> = mem
        .sections
        .iter()
        .filter_map(|s| s.name.strip_prefix("CacheGeometry "))
        .collect();
    let modules: Vec<&str> =
        mem.sections.iter().filter_map(|s| s.name.strip_prefix("Module ")).collect();
    let networks: Vec<&str> =
        net.sections.iter().filter_map(|s| s.name.strip_prefix("Network ")).collect();

    for section in &mem.sections {
        for (key, value) in &section.entries {
            let missing = match key.as_str() {
                "Geometry" => !geometries.contains(&value.as_str()),
                "LowModules" | "DataModule" | "InstModule" => !modules.contains(&value.as_str()),
                "LowNetwork" | "HighNetwork" => !networks.contains(&value.as_str()),
                _ => false,
            };
            if missing {
                findings.push(format!("[{}] {key} references missing '{value}'", section.name));
            }
        }
    }

    // Bus links must connect declared nodes of the same bus.
    for section in &net.sections {
        let Some(rest) = section.name.strip_prefix("Network.") else { continue };
        let Some((bus, link)) = rest.split_once(".Link.") else { continue };
        for key in ["Source", "Dest"] {
            if let Some(target) = section.get(key) {
                let node = format!("Network.{bus}.Node.{target}");
                if net.section(&node).is_none() {
                    findings.push(format!(
                        "link {link} in bus {bus}: {key} '{target}' is not a declared node"
                    ));
                }
            }
        }
    }
    findings
}
