//! Building instances from a family name and integer parameters.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use greedy_lab::exact;
use greedy_lab::instances::{self, Instance};
use greedy_lab::rng::mix_seed;

use crate::Usage;

pub const FAMILIES: &[&str] = &[
    "gab",
    "gab-double",
    "ga2-bipartite",
    "fig2",
    "fig3",
    "path",
    "cycle",
    "erdos-renyi",
    "random-regular",
    "random-bounded",
];

pub type Params = BTreeMap<String, i64>;

fn get(p: &Params, key: &str, family: &str) -> Result<usize> {
    match p.get(key) {
        Some(&v) if v >= 0 => Ok(v as usize),
        Some(&v) => Err(Usage(format!("--{key} must be non-negative, got {v}")).into()),
        None => Err(Usage(format!("family `{family}` needs --{key}")).into()),
    }
}

fn perm(p: &Params) -> Vec<usize> {
    // encoded as a six-digit number, identity by default
    match p.get("perm") {
        Some(&code) => {
            let s = format!("{code:06}");
            s.bytes().map(|b| (b - b'0') as usize).collect()
        }
        None => (0..6).collect(),
    }
}

pub fn build(family: &str, p: &Params, seed: u64) -> Result<Instance> {
    let s = mix_seed(seed, &[0x1f]);
    let inst = match family {
        "gab" => instances::gen_gab(get(p, "a", family)?, get(p, "b", family)?),
        "gab-double" => instances::gen_gab_bipartite_double(get(p, "a", family)?),
        "ga2-bipartite" => instances::gen_ga2_bipartite(get(p, "a", family)?),
        "fig2" => instances::gen_fig2_gadget(&perm(p)),
        "fig3" => instances::gen_fig3_gadget(&perm(p)),
        "path" => instances::gen_path(get(p, "n", family)?),
        "cycle" => instances::gen_cycle(get(p, "n", family)?),
        "erdos-renyi" => instances::gen_erdos_renyi(get(p, "n", family)?, get(p, "m", family)?, s),
        "random-regular" => instances::gen_random_regular(get(p, "n", family)?, get(p, "d", family)?, s),
        "random-bounded" => {
            instances::gen_random_bounded(get(p, "n", family)?, get(p, "m", family)?, get(p, "cap", family)?, s)
        }
        other => bail!(Usage(format!("unknown family `{other}`; known: {}", FAMILIES.join(", ")))),
    };
    inst.map_err(|e| Usage(e.to_string()).into())
}

/// Loads `<dir>/<name>.graph` (plus metadata when present).
pub fn load(path: &Path) -> Result<Instance> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .and_then(|f| f.to_str())
        .map(|f| f.strip_suffix(".graph").unwrap_or(f))
        .with_context(|| format!("bad instance path {}", path.display()))?;
    Ok(Instance::load(dir, name)?)
}

/// Certified optimum size, solving exactly when the instance has none.
pub fn optimum(inst: &Instance) -> Option<usize> {
    inst.optimum_size().or_else(|| exact::max_matching_exact(&inst.graph).ok().map(|c| c.size))
}

pub fn describe(p: &Params) -> String {
    p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}
