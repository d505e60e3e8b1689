//! Body inputs: named built-ins and VPolytope JSON files.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use convex_sandwich::{generate, VPolytope, VPolytopeData};

/// Built-in body specs: `ball-ngon:k`, `cube:d`, `crosspolytope:d`,
/// `simplex:d`, `b1cone:d`.
pub fn builtin(spec: &str) -> Result<VPolytope> {
    let (name, arg) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("body spec '{spec}' needs the form name:<n>"))?;
    let n: usize = arg
        .parse()
        .with_context(|| format!("body spec '{spec}': bad size"))?;
    let body = match name {
        "ball-ngon" => generate::regular_ngon(n),
        "cube" => generate::cube(n),
        "crosspolytope" => generate::cross_polytope(n),
        "simplex" => generate::centered_simplex(n),
        "b1cone" => generate::b1_cone(n).and_then(|c| c.as_polytope()),
        other => bail!("unknown built-in body '{other}'"),
    };
    body.map_err(|e| anyhow!("body spec '{spec}': {e}"))
}

pub fn load_file(path: &Path) -> Result<VPolytope> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading body file {}", path.display()))?;
    let data: VPolytopeData = serde_json::from_str(&text)
        .with_context(|| format!("parsing body file {}", path.display()))?;
    VPolytope::try_from(data).map_err(|e| anyhow!("body file {}: {e}", path.display()))
}

/// Resolves `--input` / `--body`, requiring exactly one.
pub fn resolve(input: Option<&Path>, body: Option<&str>) -> Result<(VPolytope, String)> {
    match (input, body) {
        (Some(p), None) => Ok((load_file(p)?, p.display().to_string())),
        (None, Some(s)) => Ok((builtin(s)?, s.to_string())),
        (None, None) => bail!("one of --input or --body is required"),
        (Some(_), Some(_)) => bail!("--input and --body are mutually exclusive"),
    }
}
