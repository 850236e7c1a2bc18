//! Shared test oracles: a hand-built reference graph, an independent
//! brute-force structure checker, and a deterministic valid-spec sampler.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};
use topoforge::graph::{ArchGraph, ComponentId, ComponentKind, Stream};
use topoforge::topo::{CacheGroup, CacheRole, TopologySpec};

/// Edge triple by component name, independent of id assignment.
pub type NamedEdge = (String, String, Stream);

pub fn named_edges(graph: &ArchGraph) -> HashSet<NamedEdge> {
    graph
        .connections
        .iter()
        .map(|c| (graph.name(c.lower), graph.name(c.upper), c.stream))
        .collect()
}

pub fn named_components(graph: &ArchGraph) -> HashSet<String> {
    graph.components.iter().map(|c| c.name()).collect()
}

/// The worked five-core bypass example, wired by hand: five private data
/// caches, two instruction caches serving cores {1,3,5} and {2,4}, two
/// level-2 data caches with fan-ins {3,2}, and a three-switch network in
/// front of main memory.
pub fn worked_example_components() -> HashSet<String> {
    let mut names: Vec<String> = (1..=5).map(|i| format!("core-{i}")).collect();
    names.extend((1..=5).map(|i| format!("dl1-{i}")));
    names.extend((1..=2).map(|i| format!("il1-{i}")));
    names.extend((1..=2).map(|i| format!("dl2-{i}")));
    names.push("mm".into());
    names.extend((1..=3).map(|i| format!("sw-{i}")));
    names.into_iter().collect()
}

pub fn worked_example_edges() -> HashSet<NamedEdge> {
    let mut edges: Vec<(String, String, Stream)> = Vec::new();
    for i in 1..=5 {
        edges.push((format!("core-{i}"), format!("dl1-{i}"), Stream::Data));
    }
    for (core, il1) in [(1, 1), (2, 2), (3, 1), (4, 2), (5, 1)] {
        edges.push((format!("core-{core}"), format!("il1-{il1}"), Stream::Instruction));
    }
    for (dl1, dl2) in [(1, 1), (2, 2), (3, 1), (4, 2), (5, 1)] {
        edges.push((format!("dl1-{dl1}"), format!("dl2-{dl2}"), Stream::Data));
    }
    edges.push(("sw-1".into(), "mm".into(), Stream::Network));
    edges.push(("dl2-1".into(), "sw-2".into(), Stream::Network));
    edges.push(("dl2-2".into(), "sw-2".into(), Stream::Network));
    edges.push(("sw-2".into(), "sw-1".into(), Stream::Network));
    edges.push(("il1-1".into(), "sw-3".into(), Stream::Network));
    edges.push(("il1-2".into(), "sw-3".into(), Stream::Network));
    edges.push(("sw-3".into(), "sw-1".into(), Stream::Network));
    edges.into_iter().collect()
}

fn serving_count(spec: &TopologySpec, level: u8, role: CacheRole) -> u32 {
    match spec.count(level, role) {
        0 => spec.count(level, CacheRole::Unified),
        n => n,
    }
}

fn serving_family(graph: &ArchGraph, spec: &TopologySpec, level: u8, role: CacheRole) -> Vec<ComponentId> {
    if spec.count(level, role) > 0 {
        graph.cache_family(level, role)
    } else {
        graph.cache_family(level, CacheRole::Unified)
    }
}

/// Naive structure check written independently of the library validator:
/// plain counting over edge scans plus breadth-first reachability. Returns
/// human-readable findings, empty when the graph looks right.
pub fn brute_force_check(graph: &ArchGraph, spec: &TopologySpec) -> Vec<String> {
    let mut findings: Vec<String> = Vec::new();


    // Component counts.
    let mut kind_counts: HashMap<String, u32> = HashMap::new();
    for c in &graph.components {
        let key = match c.kind {
            ComponentKind::Core(_) => "core".to_string(),
            ComponentKind::Cache { level, role, .. } => format!("{role}{level}"),
            ComponentKind::MainMemory => "mm".to_string(),
            ComponentKind::Switch(_) => "sw".to_string(),
        };
        *kind_counts.entry(key).or_insert(0) += 1;
    }
    if kind_counts.get("core").copied().unwrap_or(0) != spec.cores {
        findings.push(format!("core count != {}", spec.cores));
    }
    if kind_counts.get("mm").copied().unwrap_or(0) != 1 {
        findings.push("memory count != 1".to_string());
    }
    for g in &spec.groups {
        let key = format!("{}{}", g.role, g.level);
        if kind_counts.get(&key).copied().unwrap_or(0) != g.count {
            findings.push(format!("family {key} count != {}", g.count));
        }
    }
    let switches = kind_counts.get("sw").copied().unwrap_or(0);
    if spec.bypass && switches == 0 {
        findings.push("bypass without switches".to_string());
    }
    if !spec.bypass && switches > 0 {
        findings.push("switches without bypass".to_string());
    }
    if !findings.is_empty() {
        return findings; // counting below assumes cardinality holds
    }

    // Direct chain hops derived straight from the spec.
    let memory = graph.memory().expect("one memory");
    let mut hops: Vec<(String, Vec<ComponentId>, Vec<ComponentId>)> = Vec::new();
    let cores = graph.cores();
    if spec.count(1, CacheRole::Unified) > 0 {
        hops.push(("cores/l1".into(), cores.clone(), graph.cache_family(1, CacheRole::Unified)));
    } else {
        hops.push(("cores/dl1".into(), cores.clone(), graph.cache_family(1, CacheRole::Data)));
        hops.push(("cores/il1".into(), cores, graph.cache_family(1, CacheRole::Instruction)));
    }
    let top = spec.top_level();
    let landing_level = if spec.count(3, CacheRole::Unified) > 0 { 3 } else { 4 };
    for role in [CacheRole::Data, CacheRole::Instruction] {
        let mut level = 1u8;
        while level <= top {
            if serving_count(spec, level, role) == 0 {
                break;
            }
            let lowers = serving_family(graph, spec, level, role);
            let mut next = level + 1;
            while next <= top && serving_count(spec, next, role) == 0 {
                next += 1;
            }
            let is_last_hop = next > top;
            let next_is_landing = spec.bypass && (next as u32 >= landing_level as u32 || is_last_hop);
            if spec.bypass && next_is_landing {
                break; // switched hop, checked separately below
            }
            if is_last_hop {
                hops.push((format!("{role}{level}/mm"), lowers, vec![memory]));
                break;
            }
            hops.push((
                format!("{role}{level}/{next}"),
                lowers,
                serving_family(graph, spec, next, role),
            ));
            // A unified level continues as the shared chain handled below.
            if spec.count(next, role) == 0 {
                break;
            }
            level = next;
        }
    }
    // Unified chain above any merge point.
    let mut unified_levels: Vec<u8> =
        (1..=3).filter(|&l| spec.count(l, CacheRole::Unified) > 0).collect();
    unified_levels.sort_unstable();
    for window in unified_levels.windows(2) {
        hops.push((
            format!("l{}/l{}", window[0], window[1]),
            graph.cache_family(window[0], CacheRole::Unified),
            graph.cache_family(window[1], CacheRole::Unified),
        ));
    }
    if let Some(&top_unified) = unified_levels.last() {
        hops.push((
            format!("l{top_unified}/mm"),
            graph.cache_family(top_unified, CacheRole::Unified),
            vec![memory],
        ));
    }

    for (label, lowers, uppers) in &hops {
        let nc = lowers.len();
        let mc = uppers.len();
        if nc == 0 || mc == 0 {
            continue;
        }
        let mut total = 0usize;
        let mut fan_in: HashMap<ComponentId, usize> = HashMap::new();
        let mut child_edges: HashMap<ComponentId, usize> = HashMap::new();
        for conn in &graph.connections {
            if lowers.contains(&conn.lower) && uppers.contains(&conn.upper) {
                total += 1;
                *fan_in.entry(conn.upper).or_insert(0) += 1;
                *child_edges.entry(conn.lower).or_insert(0) += 1;
            }
        }
        let base = nc / mc;
        let remainder = nc % mc;
        if total != base * mc + remainder {
            findings.push(format!("{label}: {total} edges, quota says {}", base * mc + remainder));
        }
        let max = uppers.iter().map(|u| fan_in.get(u).copied().unwrap_or(0)).max().unwrap_or(0);
        let min = uppers.iter().map(|u| fan_in.get(u).copied().unwrap_or(0)).min().unwrap_or(0);
        if max - min > 1 {
            findings.push(format!("{label}: fan-in spread {} > 1", max - min));
        }
        for lower in lowers {
            if child_edges.get(lower).copied().unwrap_or(0) != 1 {
                findings.push(format!("{label}: child without exactly one parent"));
            }
        }
    }

    // Bypass: switched families resolve through switches onto landings.
    if spec.bypass {
        let landings = if spec.count(3, CacheRole::Unified) > 0 {
            graph.cache_family(3, CacheRole::Unified)
        } else {
            vec![memory]
        };
        let data_top = spec.data_split_top().expect("bypass has split data");
        let instr_top = spec.instr_split_top().expect("bypass has split instruction");
        for (role, level) in [(CacheRole::Data, data_top), (CacheRole::Instruction, instr_top)] {
            let members = graph.cache_family(level, role);
            let mut per_landing: HashMap<ComponentId, usize> = HashMap::new();
            for &member in &members {
                let ups: Vec<_> = graph.connections.iter().filter(|c| c.lower == member).collect();
                if ups.len() != 1 {
                    findings.push(format!("{role}{level} member has {} uplinks", ups.len()));
                    continue;
                }
                // Walk switches to the landing.
                let mut current = ups[0].upper;
                let mut hopped = false;
                let mut steps = 0;
                loop {
                    steps += 1;
                    if steps > graph.components.len() {
                        findings.push("switch walk did not terminate".to_string());
                        break;
                    }
                    match graph.component(current).kind {
                        ComponentKind::Switch(_) => {
                            hopped = true;
                            let next: Vec<_> =
                                graph.connections.iter().filter(|c| c.lower == current).collect();
                            if next.len() != 1 {
                                findings.push(format!("switch with {} uplinks", next.len()));
                                break;
                            }
                            current = next[0].upper;
                        }
                        _ => break,
                    }
                }
                if !hopped {
                    findings.push(format!("{role}{level} member reaches the last level without switches"));
                } else if landings.contains(&current) {
                    *per_landing.entry(current).or_insert(0) += 1;
                } else {
                    findings.push(format!("{role}{level} member lands outside the last level"));
                }
            }
            let landed: usize = per_landing.values().sum();
            if landed == members.len() && !landings.is_empty() {
                let counts: Vec<usize> =
                    landings.iter().map(|l| per_landing.get(l).copied().unwrap_or(0)).collect();
                let max = counts.iter().max().copied().unwrap_or(0);
                let min = counts.iter().min().copied().unwrap_or(0);
                if max - min > 1 {
                    findings.push(format!("{role}{level} family spread {} > 1 across landings", max - min));
                }
            }
        }
        // Switch degrees.
        for &sw in &graph.switches() {
            let degree = graph.connections.iter().filter(|c| c.upper == sw).count();
            if degree > 3 {
                findings.push(format!("switch lower degree {degree} > 3"));
            }
        }
    }

    // Every component reaches memory following upward edges (reverse BFS).
    let mut reached: HashSet<ComponentId> = HashSet::new();
    let mut queue = VecDeque::from([memory]);
    reached.insert(memory);
    while let Some(node) = queue.pop_front() {
        for conn in &graph.connections {
            if conn.upper == node && reached.insert(conn.lower) {
                queue.push_back(conn.lower);
            }
        }
    }
    if reached.len() != graph.components.len() {
        findings.push(format!(
            "{} components cannot reach memory",
            graph.components.len() - reached.len()
        ));
    }

    findings
}

/// splitmix64: tiny deterministic generator for the acceptance corpus.
pub struct Splitmix(pub u64);

impl Splitmix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in 1..=bound.
    pub fn pick(&mut self, bound: u32) -> u32 {
        (self.next_u64() % u64::from(bound)) as u32 + 1
    }

    pub fn chance(&mut self) -> bool {
        self.next_u64() & 1 == 0
    }
}

/// Builds one of the six valid spec shapes from raw sampled numbers; every
/// output satisfies the name-grammar rules by construction.
pub fn build_spec(shape: u32, cores: u32, raw: [u32; 5], extra: bool) -> TopologySpec {
    let g = CacheGroup::new;
    let (d, i, u) = (CacheRole::Data, CacheRole::Instruction, CacheRole::Unified);
    match shape % 6 {
        0 => {
            let l1 = raw[0].min(cores);
            let l2 = raw[1].min(l1);
            let l3 = raw[2].min(l2);
            let mut groups = vec![g(1, u, l1)];
            let depth = raw[3] % 3;
            if depth >= 1 {
                groups.push(g(2, u, l2));
            }
            if depth >= 2 {
                groups.push(g(3, u, l3));
            }
            TopologySpec::new(cores, groups, false)
        }
        1 => {
            let d1 = raw[0].min(cores);
            let i1 = raw[1].min(cores);
            TopologySpec::new(cores, vec![g(1, d, d1), g(1, i, i1)], false)
        }
        2 => {
            let d1 = raw[0].min(cores);
            let i1 = raw[1].min(cores);
            let u2 = raw[2].min(d1).min(i1);
            let mut groups = vec![g(1, d, d1), g(1, i, i1), g(2, u, u2)];
            if extra {
                groups.push(g(3, u, raw[3].min(u2)));
            }
            TopologySpec::new(cores, groups, false)
        }
        3 => {
            let d1 = raw[0].min(cores);
            let i1 = raw[1].min(cores);
            let d2 = raw[2].min(d1);
            let i2 = raw[3].min(i1);
            let mut groups = vec![g(1, d, d1), g(1, i, i1), g(2, d, d2), g(2, i, i2)];
            if extra {
                groups.push(g(3, u, raw[4].min(d2).min(i2)));
            }
            TopologySpec::new(cores, groups, false)
        }
        4 => {
            let d1 = raw[0].min(cores);
            let i1 = raw[1].min(cores);
            let d2 = raw[2].min(d1);
            let mut groups = vec![g(1, d, d1), g(1, i, i1), g(2, d, d2)];
            if extra {
                groups.push(g(3, u, raw[3].min(d2).min(i1)));
            }
            TopologySpec::new(cores, groups, true)
        }
        _ => {
            let d1 = raw[0].min(cores);
            let i1 = raw[1].min(cores);
            let d2 = raw[2].min(d1);
            let i2 = raw[3].min(i1);
            let mut groups = vec![g(1, d, d1), g(1, i, i1), g(2, d, d2), g(2, i, i2)];
            if extra {
                groups.push(g(3, u, raw[4].min(d2).min(i2)));
            }
            TopologySpec::new(cores, groups, true)
        }
    }
}

/// Deterministic stream of valid specs covering all five methods.
pub fn sample_spec(rng: &mut Splitmix, max_cores: u32) -> TopologySpec {
    let shape = (rng.next_u64() % 6) as u32;
    let cores = rng.pick(max_cores);
    let raw = [
        rng.pick(max_cores),
        rng.pick(max_cores),
        rng.pick(max_cores),
        rng.pick(max_cores),
        rng.pick(max_cores),
    ];
    let extra = rng.chance();
    let spec = build_spec(shape, cores, raw, extra);
    spec.validate().expect("sampler only produces valid specs");
    spec
}
