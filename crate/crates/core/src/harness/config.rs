//! Experiment configuration: a flat `key = value` text format where every
//! key can be overridden by a command-line flag.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::consensus::StepSizePolicy;
use crate::error::{Error, Result};
use crate::geometry::ManifoldHandle;
use crate::network::{make_topology, Graph, TopologySpec};

/// Fully resolved configuration for one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub manifold: ManifoldHandle,
    pub graph: Graph,
    pub n: usize,
    pub sigma: f64,
    pub seed: u64,
    pub iterations: usize,
    pub policy: StepSizePolicy,
    pub out_dir: PathBuf,
    pub name: String,
}

/// Raw string key/value pairs, as read from a config file or flags.
/// Known keys: `manifold`, `topology`, `n`, `sigma`, `seed`, `iterations`,
/// `policy`, `out`, `name`.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "manifold",
    "topology",
    "n",
    "sigma",
    "seed",
    "iterations",
    "policy",
    "out",
    "name",
];

impl RawConfig {
    /// Parses `key = value` lines; `#` starts a comment, blank lines are
    /// skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = match raw_line.find('#') {
                Some(idx) => &raw_line[..idx],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Parse(format!(
                    "line {}: unknown key {key:?} (known: {})",
                    lineno + 1,
                    KNOWN_KEYS.join(", ")
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(RawConfig { values })
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Resolves the raw values into a typed config, applying defaults for
    /// missing keys.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let manifold_spec = self.get("manifold").unwrap_or("so:7");
        let manifold = parse_manifold(manifold_spec)?;
        let n: usize = self.parse_num("n", 15)?;
        if n < 2 {
            return Err(Error::Parse("n must be at least 2".into()));
        }
        let topology = self.get("topology").unwrap_or("circulant:15:1,3");
        let graph = parse_topology(topology)?;
        if graph.n_vertices() != n {
            return Err(Error::Parse(format!(
                "topology has {} vertices but n = {n}",
                graph.n_vertices()
            )));
        }
        let sigma: f64 = self.parse_num("sigma", 0.2)?;
        if sigma < 0.0 {
            return Err(Error::Parse("sigma must be >= 0".into()));
        }
        let name = self
            .get("name")
            .map(str::to_string)
            .unwrap_or_else(|| manifold_spec.replace(':', "_"));
        Ok(ExperimentConfig {
            manifold,
            graph,
            n,
            sigma,
            seed: self.parse_num("seed", 0u64)?,
            iterations: self.parse_num("iterations", 150usize)?,
            policy: parse_policy(self.get("policy").unwrap_or("auto-descent"))?,
            out_dir: PathBuf::from(self.get("out").unwrap_or("results")),
            name,
        })
    }

    fn parse_num<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|e| Error::Parse(format!("key {key}: {e}"))),
        }
    }
}

/// Parses `euclidean:N`, `sphere:N`, `so:N` or `grassmann:N:P`.
pub fn parse_manifold(spec: &str) -> Result<ManifoldHandle> {
    let parts: Vec<&str> = spec.split(':').collect();
    let usage = || {
        Error::Parse(format!(
            "bad manifold spec {spec:?}; expected euclidean:N, sphere:N, so:N or grassmann:N:P"
        ))
    };
    let num = |s: &str| s.parse::<usize>().map_err(|_| usage());
    match parts.as_slice() {
        ["euclidean", n] => Ok(ManifoldHandle::euclidean(num(n)?)),
        ["sphere", n] => Ok(ManifoldHandle::sphere(num(n)?)),
        ["so", n] => {
            let n = num(n)?;
            if n < 2 {
                return Err(usage());
            }
            Ok(ManifoldHandle::special_orthogonal(n))
        }
        ["grassmann", n, p] => {
            let (n, p) = (num(n)?, num(p)?);
            crate::geometry::ManifoldHandle::new(crate::geometry::ManifoldKind::Grassmann(n, p))
        }
        _ => Err(usage()),
    }
}

/// Parses `line:N`, `ring:N`, `circulant:N:o1,o2`, `complete:N`,
/// `tree:N:seed`, `regular:N:k:seed` or `file:<path>` (edge-list format).
pub fn parse_topology(spec: &str) -> Result<Graph> {
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)?;
        return Graph::from_edge_list(&text);
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let usage = || Error::Parse(format!("bad topology spec {spec:?}"));
    let num = |s: &str| s.parse::<usize>().map_err(|_| usage());
    let seed = |s: &str| s.parse::<u64>().map_err(|_| usage());
    let topo = match parts.as_slice() {
        ["line", n] => TopologySpec::Line(num(n)?),
        ["ring", n] => TopologySpec::Ring(num(n)?),
        ["complete", n] => TopologySpec::Complete(num(n)?),
        ["circulant", n, offsets] => {
            let offsets = offsets
                .split(',')
                .map(num)
                .collect::<Result<Vec<usize>>>()?;
            TopologySpec::Circulant(num(n)?, offsets)
        }
        ["tree", n, s] => TopologySpec::Tree(num(n)?, seed(s)?),
        ["regular", n, k, s] => TopologySpec::RandomRegular(num(n)?, num(k)?, seed(s)?),
        _ => return Err(usage()),
    };
    make_topology(&topo)
}

/// Parses `auto-descent`, `auto-point` or `eps:<value>`.
pub fn parse_policy(spec: &str) -> Result<StepSizePolicy> {
    match spec {
        "auto-descent" => Ok(StepSizePolicy::auto_descent()),
        "auto-point" => Ok(StepSizePolicy::auto_point_convergence()),
        _ => {
            if let Some(v) = spec.strip_prefix("eps:") {
                let eps: f64 = v
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad step size {v:?}")))?;
                Ok(StepSizePolicy::explicit(eps))
            } else {
                Err(Error::Parse(format!(
                    "bad policy {spec:?}; expected auto-descent, auto-point or eps:<value>"
                )))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file_with_comments() {
        let raw = RawConfig::parse(
            "# experiment\nmanifold = sphere:6\nn = 15\nsigma = 0.2  # noise\nseed = 3\n",
        )
        .unwrap();
        let cfg = raw.resolve().unwrap();
        assert_eq!(cfg.manifold.intrinsic_dim, 6);
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.iterations, 150);
        assert_eq!(cfg.name, "sphere_6");
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        assert!(RawConfig::parse("bogus = 1\n").is_err());
        assert!(RawConfig::parse("manifold sphere\n").is_err());
    }

    #[test]
    fn flag_overrides_win() {
        let mut raw = RawConfig::parse("sigma = 0.2\n").unwrap();
        raw.set("sigma", "0.5");
        assert_eq!(raw.resolve().unwrap().sigma, 0.5);
    }

    #[test]
    fn topology_node_count_must_match_n() {
        let mut raw = RawConfig::default();
        raw.set("topology", "ring:5");
        raw.set("n", "6");
        assert!(raw.resolve().is_err());
    }

    #[test]
    fn manifold_specs() {
        assert!(parse_manifold("so:7").is_ok());
        assert!(parse_manifold("grassmann:7:3").is_ok());
        assert!(parse_manifold("grassmann:3:3").is_err());
        assert!(parse_manifold("torus:2").is_err());
    }

    #[test]
    fn policy_specs() {
        assert!(matches!(
            parse_policy("eps:0.25").unwrap().mode,
            crate::consensus::StepMode::Explicit(v) if v == 0.25
        ));
        assert!(parse_policy("eps:x").is_err());
        assert!(parse_policy("unknown").is_err());
    }
}
