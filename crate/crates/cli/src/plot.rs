//! Plot emission: a whitespace-separated data file and a gnuplot script
//! reading it.

use std::fs;
use std::path::{Path, PathBuf};

use acl_core::real::ratio_to_f64;
use acl_core::record::CountRecord;
use num_traits::Zero;

use crate::config::Command;

/// (x, observed/predicted) for every row with a numeric M or m and a nonzero prediction.
pub fn points(records: &[CountRecord]) -> Vec<(String, f64, f64)> {
    records
        .iter()
        .filter_map(|r| {
            let x: f64 = r.params.get("M").or_else(|| r.params.get("m"))?.parse().ok()?;
            let pred = r.predicted.to_rational();
            if pred.is_zero() {
                return None;
            }
            Some((r.label.clone(), x, ratio_to_f64(&(r.observed.to_rational() / pred))))
        })
        .collect()
}

pub fn write(dir: &Path, cmd: Command, records: &[CountRecord]) -> std::io::Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let slug = cmd.name().replace(' ', "-");
    let data = dir.join(format!("acl-{slug}.dat"));
    let script = dir.join(format!("acl-{slug}.gp"));
    let xname = if matches!(cmd, Command::Cycles) { "m" } else { "M" };

    let mut text = format!("# series {xname} observed/predicted\n");
    for (label, x, y) in points(records) {
        text.push_str(&format!("{} {x} {y:.12}\n", label.replace(' ', "_")));
    }
    fs::write(&data, text)?;

    let data_name = data.file_name().unwrap().to_string_lossy().into_owned();
    let gp = format!(
        "set terminal pngcairo size 900,600\n\
         set output 'acl-{slug}.png'\n\
         set logscale x\n\
         set xlabel '{xname}'\n\
         set ylabel 'observed / predicted'\n\
         set key left top\n\
         plot '{data_name}' using 2:3 with linespoints title '{}'\n",
        cmd.name()
    );
    fs::write(&script, gp)?;
    Ok((data, script))
}
