//! Plain-text `kind:key=value,...` format for body specs.
//!
//! ```text
//! ball:R=1              ball:R=1,n=5
//! cylinder:r=0.51,hh=0.51
//! double_cone:a=1,c=1
//! bump_sphere:role=K,n=3,v=0.3,delta=0.02,delta_big=0.12,eps=0.0002,eps_small=0.00002,layers=8
//! polar:<spec>
//! dilated:c=2:<spec>
//! rotated:matrix=m00;m01;...;m(n-1)(n-1):<spec>
//! rotated:axis=x;y;z,angle=t:<spec>
//! ```
//!
//! Numbers are written with Rust's shortest round-trip formatting, so
//! `parse(display(spec)) == spec` exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::BodySpec;
use crate::casestudies::{build_bump_body, BumpParams, BumpRole};
use crate::error::{Error, Result};
use crate::geom::{Rotation, UnitVector};

impl fmt::Display for BodySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodySpec::Ball { radius, dim: 3 } => write!(f, "ball:R={radius}"),
            BodySpec::Ball { radius, dim } => write!(f, "ball:R={radius},n={dim}"),
            BodySpec::Cylinder {
                radius,
                half_height,
            } => write!(f, "cylinder:r={radius},hh={half_height}"),
            BodySpec::DoubleCone {
                base_radius,
                apex_height,
            } => write!(f, "double_cone:a={base_radius},c={apex_height}"),
            BodySpec::BumpSphere(b) => write!(f, "bump_sphere:role={},{}", b.role, b.params),
            BodySpec::Polar(inner) => write!(f, "polar:{inner}"),
            BodySpec::Dilated(c, inner) => write!(f, "dilated:c={c}:{inner}"),
            BodySpec::Rotated(r, inner) => {
                let entries: Vec<String> = r.to_rows().iter().map(|x| x.to_string()).collect();
                write!(f, "rotated:matrix={}:{inner}", entries.join(";"))
            }
        }
    }
}

impl fmt::Display for BumpRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BumpRole::K => "K",
            BumpRole::L => "L",
        })
    }
}

impl fmt::Display for BumpParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={},v={},delta={},delta_big={},eps={},eps_small={},layers={}",
            self.n, self.v, self.delta, self.delta_big, self.eps, self.eps_small, self.layers
        )
    }
}

fn parse_error(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn key_values(s: &str) -> Result<BTreeMap<&str, &str>> {
    let mut out = BTreeMap::new();
    if s.is_empty() {
        return Ok(out);
    }
    for item in s.split(',') {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| parse_error(format!("expected key=value, got `{item}`")))?;
        if out.insert(k.trim(), v.trim()).is_some() {
            return Err(parse_error(format!("duplicate key `{k}`")));
        }
    }
    Ok(out)
}

fn take<T: FromStr>(kv: &mut BTreeMap<&str, &str>, key: &str) -> Result<T> {
    let raw = kv
        .remove(key)
        .ok_or_else(|| parse_error(format!("missing key `{key}`")))?;
    raw.parse()
        .map_err(|_| parse_error(format!("bad value `{raw}` for `{key}`")))
}

fn finish(kv: BTreeMap<&str, &str>, kind: &str) -> Result<()> {
    match kv.keys().next() {
        Some(k) => Err(parse_error(format!("unknown key `{k}` for {kind}"))),
        None => Ok(()),
    }
}

fn parse_numbers(s: &str) -> Result<Vec<f64>> {
    s.split(';')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| parse_error(format!("bad number `{x}`")))
        })
        .collect()
}

impl FromStr for BumpParams {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut kv = key_values(s)?;
        let defaults = BumpParams::default();
        let mut get = |key: &str, default: f64| -> Result<f64> {
            if kv.contains_key(key) {
                take(&mut kv, key)
            } else {
                Ok(default)
            }
        };
        let v = get("v", defaults.v)?;
        let delta = get("delta", defaults.delta)?;
        let delta_big = get("delta_big", defaults.delta_big)?;
        let eps = get("eps", defaults.eps)?;
        let eps_small = get("eps_small", defaults.eps_small)?;
        let n: usize = if kv.contains_key("n") {
            take(&mut kv, "n")?
        } else {
            defaults.n
        };
        let layers: usize = if kv.contains_key("layers") {
            take(&mut kv, "layers")?
        } else {
            1 << n
        };
        finish(kv, "bump parameters")?;
        Ok(BumpParams {
            n,
            v,
            delta,
            delta_big,
            eps,
            eps_small,
            layers,
        })
    }
}

impl FromStr for BodySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let spec = match kind {
            "polar" => BodySpec::Polar(Box::new(rest.parse()?)),
            "dilated" | "rotated" => {
                let (args, inner) = rest
                    .split_once(':')
                    .ok_or_else(|| parse_error(format!("{kind} needs `{kind}:<args>:<spec>`")))?;
                let inner: BodySpec = inner.parse()?;
                if kind == "dilated" {
                    let mut kv = key_values(args)?;
                    let c = take(&mut kv, "c")?;
                    finish(kv, kind)?;
                    BodySpec::Dilated(c, Box::new(inner))
                } else {
                    let rotation = parse_rotation(args, inner.dim())?;
                    BodySpec::Rotated(rotation, Box::new(inner))
                }
            }
            "ball" => {
                let mut kv = key_values(rest)?;
                let radius = take(&mut kv, "R")?;
                let dim = if kv.contains_key("n") {
                    take(&mut kv, "n")?
                } else {
                    3
                };
                finish(kv, kind)?;
                BodySpec::Ball { radius, dim }
            }
            "cylinder" => {
                let mut kv = key_values(rest)?;
                let radius = take(&mut kv, "r")?;
                let half_height = take(&mut kv, "hh")?;
                finish(kv, kind)?;
                BodySpec::Cylinder {
                    radius,
                    half_height,
                }
            }
            "double_cone" => {
                let mut kv = key_values(rest)?;
                let base_radius = take(&mut kv, "a")?;
                let apex_height = take(&mut kv, "c")?;
                finish(kv, kind)?;
                BodySpec::DoubleCone {
                    base_radius,
                    apex_height,
                }
            }
            "bump_sphere" => {
                let (role, params) = match rest.split_once(',') {
                    Some((first, tail)) if first.starts_with("role=") => (&first[5..], tail),
                    _ if rest.starts_with("role=") => (&rest[5..], ""),
                    _ => return Err(parse_error("bump_sphere needs `role=K|L` first")),
                };
                let role = match role {
                    "K" => BumpRole::K,
                    "L" => BumpRole::L,
                    other => return Err(parse_error(format!("unknown role `{other}`"))),
                };
                let params: BumpParams = params.parse()?;
                BodySpec::BumpSphere(Arc::new(build_bump_body(&params, role)?))
            }
            other => return Err(parse_error(format!("unknown body kind `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_rotation(args: &str, dim: usize) -> Result<Rotation> {
    if let Some(m) = args.strip_prefix("matrix=") {
        let entries = parse_numbers(m)?;
        if entries.len() != dim * dim {
            return Err(parse_error(format!(
                "rotation matrix has {} entries, expected {}",
                entries.len(),
                dim * dim
            )));
        }
        return Rotation::from_rows(dim, &entries);
    }
    let mut kv = key_values(args)?;
    let axis = kv
        .remove("axis")
        .ok_or_else(|| parse_error("rotation needs `matrix=` or `axis=..,angle=..`"))?;
    let angle: f64 = take(&mut kv, "angle")?;
    finish(kv, "rotation")?;
    if dim != 3 {
        return Err(Error::UnsupportedDimension {
            got: dim,
            expected: "3 for axis-angle rotations".into(),
        });
    }
    let axis = UnitVector::new(parse_numbers(axis)?)?;
    if axis.dim() != 3 {
        return Err(parse_error("rotation axis must have 3 components"));
    }
    Ok(Rotation::about_axis(&axis, angle))
}
