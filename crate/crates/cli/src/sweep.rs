//! Cross-product parameter sweeps over config paths.

use rayon::prelude::*;
use serde_json::Value;
use std::path::PathBuf;

use crate::config::{parse, RunConfig};
use crate::output::{config_hash, csv_header, num, write_atomic, write_json};
use crate::run::{build_model, run, tau_report, RunOptions};
use crate::CliError;

/// `path[,path...]=start:stop:steps`; all paths share the swept value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub paths: Vec<String>,
    pub values: Vec<f64>,
}

impl std::str::FromStr for SweepAxis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |reason: &str| CliError::Invalid { field: format!("--axis {s}"), reason: reason.into() };
        let (lhs, rhs) = s.split_once('=').ok_or_else(|| bad("expected path=start:stop:steps"))?;
        let paths: Vec<String> = lhs.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect();
        if paths.is_empty() {
            return Err(bad("missing path"));
        }
        let parts: Vec<&str> = rhs.split(':').collect();
        let [start, stop, steps] = parts[..] else { return Err(bad("expected start:stop:steps")) };
        let start: f64 = start.parse().map_err(|_| bad("start is not a number"))?;
        let stop: f64 = stop.parse().map_err(|_| bad("stop is not a number"))?;
        let steps: usize = steps.parse().map_err(|_| bad("steps is not a positive integer"))?;
        if steps == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(bad("need finite bounds and steps ≥ 1"));
        }
        let values = bosonet::phase_space::Axis { min: start, max: stop, steps }.points();
        Ok(SweepAxis { paths, values })
    }
}

fn set_path(root: &mut Value, path: &str, x: f64) -> Result<(), CliError> {
    let missing = || CliError::Invalid { field: path.into(), reason: "no such field in the config".into() };
    let mut node = root;
    for key in path.split('.') {
        node = match node {
            Value::Object(map) => map.get_mut(key).ok_or_else(missing)?,
            Value::Array(items) => key.parse::<usize>().ok().and_then(|i| items.get_mut(i)).ok_or_else(missing)?,
            _ => return Err(missing()),
        };
    }
    *node = match node {
        Value::Number(n) if n.is_u64() || n.is_i64() => {
            let r = x.round();
            if (x - r).abs() > 1e-9 {
                return Err(CliError::Invalid { field: path.into(), reason: format!("integer field cannot take {x}") });
            }
            if r < 0.0 {
                Value::from(r as i64)
            } else {
                Value::from(r as u64)
            }
        }
        Value::Number(_) => Value::from(x),
        _ => return Err(CliError::Invalid { field: path.into(), reason: "not a numeric field".into() }),
    };
    Ok(())
}

pub struct Point {
    pub coords: Vec<f64>,
    pub config: RunConfig,
}

pub fn expand(base: &RunConfig, axes: &[SweepAxis]) -> Result<Vec<Point>, CliError> {
    if axes.len() > 2 {
        return Err(CliError::Invalid { field: "--axis".into(), reason: "at most two swept parameters".into() });
    }
    let template = serde_json::to_value(base).expect("config serializes");
    let mut coords: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        coords = coords.into_iter().flat_map(|c| axis.values.iter().map(move |&v| [c.clone(), vec![v]].concat())).collect();
    }
    coords
        .into_iter()
        .map(|c| {
            let mut v = template.clone();
            for (axis, &x) in axes.iter().zip(&c) {
                for p in &axis.paths {
                    set_path(&mut v, p, x)?;
                }
            }
            let config = parse(&v.to_string())?;
            Ok(Point { coords: c, config })
        })
        .collect()
}

/// One row per (point, metric): the swept coordinates, metric name, value.
pub fn sweep(base: &RunConfig, axes: &[SweepAxis], opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    if axes.is_empty() {
        return Ok(run(base, opts)?.files);
    }
    let points = expand(base, axes)?;
    let eval = |(i, p): (usize, &Point)| -> Result<Vec<String>, CliError> {
        let model = build_model(&p.config)?;
        let report = tau_report(&model, p.config.pair)?;
        let hash = config_hash(&p.config);
        write_json(&opts.out.join("points").join(format!("point_{i:04}.json")), &hash, &report)?;
        let prefix: Vec<String> = p.coords.iter().map(|&x| num(x)).collect();
        let prefix = prefix.join(",");
        let mut rows = vec![
            format!("{prefix},tau_diff,{}", num(report.tau_diff.as_f64())),
            format!("{prefix},tau_int,{}", num(report.tau_int.as_f64())),
            format!("{prefix},tau_d,{}", num(report.tau_d.as_f64())),
        ];
        for (m, t) in report.tau_dir.iter().enumerate() {
            rows.push(format!("{prefix},tau_dir_{},{}", m + 1, num(t.as_f64())));
        }
        Ok(rows)
    };
    let rows: Vec<Vec<String>> = if opts.serial {
        points.iter().enumerate().map(eval).collect::<Result<_, _>>()?
    } else {
        points.par_iter().enumerate().map(eval).collect::<Result<_, _>>()?
    };
    let mut text = csv_header(&config_hash(base));
    let names: Vec<String> = axes.iter().map(|a| a.paths.join("+")).collect();
    text.push_str(&format!("{},metric,value\n", names.join(",")));
    for r in rows.iter().flatten() {
        text.push_str(r);
        text.push('\n');
    }
    let path = opts.out.join("sweep.csv");
    write_atomic(&path, text.as_bytes())?;
    Ok(vec![path])
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn axis_parses_shared_paths() {
        let a: SweepAxis = "network.n,state.r=1:4:4".parse().unwrap();
        assert_eq!(a.paths, ["network.n", "state.r"]);
        assert_eq!(a.values, [1.0, 2.0, 3.0, 4.0]);
        assert!("network.n=1:4".parse::<SweepAxis>().is_err());
        assert!("=1:4:2".parse::<SweepAxis>().is_err());
        assert!("x=1:4:0".parse::<SweepAxis>().is_err());
    }

    #[test]
    fn set_path_walks_objects_and_arrays() {
        let mut v = json!({"a": {"b": [1.5, 2.5]}, "n": 3});
        set_path(&mut v, "a.b.1", 7.0).unwrap();
        set_path(&mut v, "n", 4.0).unwrap();
        assert_eq!(v, json!({"a": {"b": [1.5, 7.0]}, "n": 4}));
        assert!(v["n"].is_u64());
        assert!(set_path(&mut v, "n", 4.5).is_err());
        assert!(set_path(&mut v, "a.c", 1.0).is_err());
        assert!(set_path(&mut v, "a.b.9", 1.0).is_err());
        assert!(set_path(&mut v, "a", 1.0).is_err());
    }
}
