//! Architecture graph generation from a topology spec.
//!
//! Components are created in a fixed order (cores, then cache groups in
//! canonical order, then main memory, then switches in creation order) and
//! wiring is fully deterministic, so equal specs always produce identical
//! graphs.

use crate::classify::{classify_valid, TopologyKind};
use crate::topo::{CacheRole, TopoError, TopologySpec};
use crate::validate::ValidationReport;
use std::fmt;
use thiserror::Error;

/// Ordinal identifier, stable within one graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    /// 1-based core index.
    Core(u32),
    /// Cache with 1-based index inside its (level, role) family.
    Cache { level: u8, role: CacheRole, index: u32 },
    MainMemory,
    /// 1-based switch index in creation order.
    Switch(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Component {
    pub id: ComponentId,
    pub kind: ComponentKind,
}

impl Component {
    /// Stable short name used in edge lists and emitted configs.
    pub fn name(&self) -> String {
        match self.kind {
            ComponentKind::Core(i) => format!("core-{i}"),
            ComponentKind::Cache { level, role, index } => {
                let prefix = match role {
                    CacheRole::Data => "dl",
                    CacheRole::Instruction => "il",
                    CacheRole::Unified => "l",
                };
                format!("{prefix}{level}-{index}")
            }
            ComponentKind::MainMemory => "mm".to_string(),
            ComponentKind::Switch(i) => format!("sw-{i}"),
        }
    }

    /// Coarse layer used for edge direction checks. Switches sit between
    /// the cache families they aggregate (level 2 at most) and the
    /// last-level component they feed (an L3 or memory).
    pub fn rank(&self) -> u8 {
        match self.kind {
            ComponentKind::Core(_) => 0,
            ComponentKind::Cache { level, .. } => level * 2,
            ComponentKind::Switch(_) => 5,
            ComponentKind::MainMemory => 10,
        }
    }
}

/// Traffic carried by a connection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Data,
    Instruction,
    /// Single link serving both streams (unified chains).
    Both,
    /// Switch-network link of a bypass structure.
    Network,
}

impl fmt::Display for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stream::Data => "data",
            Stream::Instruction => "instruction",
            Stream::Both => "both",
            Stream::Network => "network",
        })
    }
}

impl Stream {
    fn parse(s: &str) -> Option<Stream> {
        match s {
            "data" => Some(Stream::Data),
            "instruction" => Some(Stream::Instruction),
            "both" => Some(Stream::Both),
            "network" => Some(Stream::Network),
            _ => None,
        }
    }
}

/// Directed link from a lower-layer component toward memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Connection {
    pub lower: ComponentId,
    pub upper: ComponentId,
    pub stream: Stream,
}

/// Connection budget between two adjacent chain levels with nc lower and
/// mc upper components: floor(nc/mc) per upper, nc mod mc spilled one each
/// onto the lowest-indexed uppers, nc edges in total.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConnectionQuota {
    pub base: u32,
    pub remainder: u32,
    pub total: u32,
}

#[derive(Debug, Clone, Error)]
pub enum GraphError {
    #[error("invalid topology spec: {0}")]
    InvalidSpec(#[from] TopoError),
    #[error("connection quota undefined for nc={nc}, mc={mc} (need nc >= mc >= 1)")]
    QuotaDomain { nc: u32, mc: u32 },
    #[error("level assignment needs non-empty child and parent lists")]
    EmptySide,
    #[error("bypass network requested for a non-bypass graph")]
    NotBypass,
    #[error("generated graph failed self-validation:\n{0}")]
    InvariantBroken(ValidationReport),
    #[error("malformed graph dump: {0}")]
    MalformedDump(String),
}

pub fn connection_quota(nc: u32, mc: u32) -> Result<ConnectionQuota, GraphError> {
    if mc == 0 || nc < mc {
        return Err(GraphError::QuotaDomain { nc, mc });
    }
    Ok(ConnectionQuota { base: nc / mc, remainder: nc % mc, total: nc })
}

/// Connects each child to an empty parent when one exists, otherwise to the
/// least-connected parent, ties broken by lowest parent index. Children are
/// consumed in list order.
pub fn assign_level(
    children: &[ComponentId],
    parents: &[ComponentId],
    stream: Stream,
) -> Result<Vec<Connection>, GraphError> {
    if children.is_empty() || parents.is_empty() {
        return Err(GraphError::EmptySide);
    }
    if children.len() < parents.len() {
        return Err(GraphError::QuotaDomain {
            nc: children.len() as u32,
            mc: parents.len() as u32,
        });
    }
    let mut fan_in = vec![0usize; parents.len()];
    let mut out = Vec::with_capacity(children.len());
    for &child in children {
        let pick = (0..parents.len())
            .min_by_key(|&j| (fan_in[j], j))
            .expect("parents checked non-empty");
        fan_in[pick] += 1;
        out.push(Connection { lower: child, upper: parents[pick], stream });
    }
    Ok(out)
}

/// Component/connection graph for one topology.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchGraph {
    pub spec: TopologySpec,
    pub kind: TopologyKind,
    pub components: Vec<Component>,
    pub connections: Vec<Connection>,
}

impl ArchGraph {
    fn empty(spec: TopologySpec, kind: TopologyKind) -> Self {
        ArchGraph { spec, kind, components: Vec::new(), connections: Vec::new() }
    }

    fn add(&mut self, kind: ComponentKind) -> ComponentId {
        let id = ComponentId(self.components.len());
        self.components.push(Component { id, kind });
        id
    }

    fn add_switch(&mut self) -> ComponentId {
        let index = self.switches().len() as u32 + 1;
        self.add(ComponentKind::Switch(index))
    }

    pub fn component(&self, id: ComponentId) -> &Component {
        &self.components[id.0]
    }

    pub fn name(&self, id: ComponentId) -> String {
        self.component(id).name()
    }

    pub fn cores(&self) -> Vec<ComponentId> {
        self.components
            .iter()
            .filter(|c| matches!(c.kind, ComponentKind::Core(_)))
            .map(|c| c.id)
            .collect()
    }

    /// Ids of one cache family, in index order.
    pub fn cache_family(&self, level: u8, role: CacheRole) -> Vec<ComponentId> {
        self.components
            .iter()
            .filter(|c| matches!(c.kind, ComponentKind::Cache { level: l, role: r, .. } if l == level && r == role))
            .map(|c| c.id)
            .collect()
    }

    pub fn switches(&self) -> Vec<ComponentId> {
        self.components
            .iter()
            .filter(|c| matches!(c.kind, ComponentKind::Switch(_)))
            .map(|c| c.id)
            .collect()
    }

    pub fn memory(&self) -> Option<ComponentId> {
        self.components
            .iter()
            .find(|c| c.kind == ComponentKind::MainMemory)
            .map(|c| c.id)
    }

    pub fn upward(&self, id: ComponentId) -> Vec<&Connection> {
        self.connections.iter().filter(|c| c.lower == id).collect()
    }

    pub fn incoming(&self, id: ComponentId) -> Vec<&Connection> {
        self.connections.iter().filter(|c| c.upper == id).collect()
    }

    /// Deterministic text dump: header lines, `node <name>` lines, then one
    /// `<lower> -> <upper> [<stream>]` line per connection.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let name = self.spec.canonical_name().unwrap_or_else(|_| "<invalid>".into());
        out.push_str(&format!("# topology: {name}\n"));
        out.push_str(&format!("# kind: {}\n", self.kind));
        for c in &self.components {
            out.push_str(&format!("node {}\n", c.name()));
        }
        for conn in &self.connections {
            out.push_str(&format!(
                "{} -> {} [{}]\n",
                self.name(conn.lower),
                self.name(conn.upper),
                conn.stream
            ));
        }
        out
    }

    /// Parses a dump produced by [`ArchGraph::to_edge_list`]. The result is
    /// not validated; feed it to the validator to check structure.
    pub fn from_edge_list(text: &str) -> Result<ArchGraph, GraphError> {
        let mut spec: Option<TopologySpec> = None;
        let mut components: Vec<Component> = Vec::new();
        let mut names: Vec<String> = Vec::new();
        let mut connections: Vec<Connection> = Vec::new();

        let lookup = |names: &[String], name: &str, line_no: usize| {
            names
                .iter()
                .position(|n| n == name)
                .map(ComponentId)
                .ok_or_else(|| {
                    GraphError::MalformedDump(format!("line {line_no}: unknown component '{name}'"))
                })
        };

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# topology:") {
                spec = Some(crate::topo::parse_topology(rest.trim())?);
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix("node ") {
                let name = name.trim();
                let kind = parse_component_name(name).ok_or_else(|| {
                    GraphError::MalformedDump(format!("line {line_no}: bad component name '{name}'"))
                })?;
                components.push(Component { id: ComponentId(components.len()), kind });
                names.push(name.to_string());
                continue;
            }
            let (lhs, rest) = line.split_once("->").ok_or_else(|| {
                GraphError::MalformedDump(format!("line {line_no}: expected a connection line"))
            })?;
            let rest = rest.trim();
            let (upper_name, stream_part) = rest.split_once('[').ok_or_else(|| {
                GraphError::MalformedDump(format!("line {line_no}: missing [stream]"))
            })?;
            let stream_name = stream_part.trim_end().strip_suffix(']').ok_or_else(|| {
                GraphError::MalformedDump(format!("line {line_no}: missing ']'"))
            })?;
            let stream = Stream::parse(stream_name.trim()).ok_or_else(|| {
                GraphError::MalformedDump(format!("line {line_no}: unknown stream '{stream_name}'"))
            })?;
            let lower = lookup(&names, lhs.trim(), line_no)?;
            let upper = lookup(&names, upper_name.trim(), line_no)?;
            connections.push(Connection { lower, upper, stream });
        }

        let spec = spec.ok_or_else(|| {
            GraphError::MalformedDump("missing '# topology:' header".to_string())
        })?;
        let kind = classify_valid(&spec);
        Ok(ArchGraph { spec, kind, components, connections })
    }
}

fn parse_component_name(name: &str) -> Option<ComponentKind> {
    if name == "mm" {
        return Some(ComponentKind::MainMemory);
    }
    if let Some(idx) = name.strip_prefix("core-") {
        return idx.parse().ok().map(ComponentKind::Core);
    }
    if let Some(idx) = name.strip_prefix("sw-") {
        return idx.parse().ok().map(ComponentKind::Switch);
    }
    let (role, rest) = if let Some(r) = name.strip_prefix("dl") {
        (CacheRole::Data, r)
    } else if let Some(r) = name.strip_prefix("il") {
        (CacheRole::Instruction, r)
    } else if let Some(r) = name.strip_prefix('l') {
        (CacheRole::Unified, r)
    } else {
        return None;
    };
    let (level_str, index_str) = rest.split_once('-')?;
    let level: u8 = level_str.parse().ok()?;
    let index: u32 = index_str.parse().ok()?;
    if !(1..=3).contains(&level) || index == 0 {
        return None;
    }
    Some(ComponentKind::Cache { level, role, index })
}

/// Next family a chain connects to above `level`, or memory when the chain
/// tops out. In bypass graphs the instruction chain naturally lands on the
/// last-level component (L3 when present, else memory) because the skipped
/// level has no instruction-serving caches.
fn chain_target(
    graph: &ArchGraph,
    level: u8,
    role: CacheRole,
    memory: ComponentId,
) -> (Vec<ComponentId>, Stream) {
    let stream = match role {
        CacheRole::Data => Stream::Data,
        CacheRole::Instruction => Stream::Instruction,
        CacheRole::Unified => Stream::Both,
    };
    for upper in (level + 1)..=3 {
        if role != CacheRole::Unified {
            let split = graph.cache_family(upper, role);
            if !split.is_empty() {
                return (split, stream);
            }
        }
        let unified = graph.cache_family(upper, CacheRole::Unified);
        if !unified.is_empty() {
            return (unified, stream);
        }
    }
    (vec![memory], stream)
}

/// Instantiates components and wires cores and cache chains. Bypass specs
/// get plain chain wiring here; the switch network replaces the last-level
/// edges in [`build_bypass_network`].
pub fn build_core_graph(spec: &TopologySpec) -> Result<ArchGraph, GraphError> {
    spec.validate()?;
    let kind = classify_valid(spec);
    let mut graph = ArchGraph::empty(spec.clone(), kind);

    for i in 1..=spec.cores {
        graph.add(ComponentKind::Core(i));
    }
    for group in &spec.groups {
        for i in 1..=group.count {
            graph.add(ComponentKind::Cache { level: group.level, role: group.role, index: i });
        }
    }
    let memory = graph.add(ComponentKind::MainMemory);

    let cores = graph.cores();
    let unified_l1 = graph.cache_family(1, CacheRole::Unified);
    if unified_l1.is_empty() {
        let data_l1 = graph.cache_family(1, CacheRole::Data);
        let instr_l1 = graph.cache_family(1, CacheRole::Instruction);
        let mut conns = assign_level(&cores, &data_l1, Stream::Data)?;
        conns.extend(assign_level(&cores, &instr_l1, Stream::Instruction)?);
        graph.connections.extend(conns);
    } else {
        let conns = assign_level(&cores, &unified_l1, Stream::Both)?;
        graph.connections.extend(conns);
    }

    for level in 1..=3u8 {
        for role in [CacheRole::Data, CacheRole::Instruction, CacheRole::Unified] {
            let family = graph.cache_family(level, role);
            if family.is_empty() {
                continue;
            }
            let (parents, stream) = chain_target(&graph, level, role, memory);
            let conns = assign_level(&family, &parents, stream)?;
            graph.connections.extend(conns);
        }
    }

    Ok(graph)
}

/// Replaces each last-level component's incoming cache edges with a switch
/// network: one memory-side switch per landing, then per cache family a
/// pair-then-triple switch tree whose aggregate feeds that switch. No switch
/// ends up with more than three lower-side connections.
pub fn build_bypass_network(mut graph: ArchGraph) -> Result<ArchGraph, GraphError> {
    if !graph.spec.bypass {
        return Err(GraphError::NotBypass);
    }
    let memory = graph.memory().expect("core graph always has memory");
    let l3 = graph.cache_family(3, CacheRole::Unified);
    let landings = if l3.is_empty() { vec![memory] } else { l3 };

    for landing in landings {
        // Families feeding this landing, data before instruction.
        let mut feeders: Vec<(u8, CacheRole, ComponentId)> = Vec::new();
        for conn in graph.incoming(landing) {
            if let ComponentKind::Cache { level, role, .. } = graph.component(conn.lower).kind {
                feeders.push((level, role, conn.lower));
            }
        }
        let feeder_ids: Vec<ComponentId> = feeders.iter().map(|&(_, _, id)| id).collect();
        graph
            .connections
            .retain(|c| !(c.upper == landing && feeder_ids.contains(&c.lower)));
        let mut families: Vec<(CacheRole, u8, Vec<ComponentId>)> = Vec::new();
        feeders.sort_by_key(|&(level, role, id)| (role, level, id));
        for (level, role, id) in feeders {
            match families.last_mut() {
                Some((r, l, members)) if *r == role && *l == level => members.push(id),
                _ => families.push((role, level, vec![id])),
            }
        }

        let memory_side = graph.add_switch();
        graph
            .connections
            .push(Connection { lower: memory_side, upper: landing, stream: Stream::Network });

        for (_, _, members) in families {
            if members.len() == 1 {
                graph.connections.push(Connection {
                    lower: members[0],
                    upper: memory_side,
                    stream: Stream::Network,
                });
                continue;
            }
            let mut nodes = members;
            loop {
                let mut next_tier: Vec<ComponentId> = Vec::new();
                let mut i = 0;
                while i + 1 < nodes.len() {
                    let sw = graph.add_switch();
                    for &lower in &nodes[i..i + 2] {
                        graph.connections.push(Connection {
                            lower,
                            upper: sw,
                            stream: Stream::Network,
                        });
                    }
                    next_tier.push(sw);
                    i += 2;
                }
                if i < nodes.len() {
                    // Odd leftover joins the last pair switch of this tier.
                    let sw = *next_tier.last().expect("len >= 2 guarantees a pair");
                    graph.connections.push(Connection {
                        lower: nodes[i],
                        upper: sw,
                        stream: Stream::Network,
                    });
                }
                if next_tier.len() == 1 {
                    graph.connections.push(Connection {
                        lower: next_tier[0],
                        upper: memory_side,
                        stream: Stream::Network,
                    });
                    break;
                }
                nodes = next_tier;
            }
        }
    }
    Ok(graph)
}

/// Full pipeline: classify, build, wire the bypass network when requested,
/// then self-check against the validator.
pub fn generate(spec: &TopologySpec) -> Result<ArchGraph, GraphError> {
    let mut graph = build_core_graph(spec)?;
    if spec.bypass {
        graph = build_bypass_network(graph)?;
    }
    let report = crate::validate::validate_graph(&graph, spec);
    if report.ok() {
        Ok(graph)
    } else {
        Err(GraphError::InvariantBroken(report))
    }
}
