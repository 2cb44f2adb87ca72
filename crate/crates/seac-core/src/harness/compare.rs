//! Cross-run comparison of evaluation tables: per-algorithm statistics and
//! the seac / fixed-rate energy ratio.

use std::collections::BTreeMap;
use std::path::Path;

use crate::env::Termination;

use super::metrics::read_eval_file;
use super::HarnessError;

/// Per-run means extracted from one eval file.
#[derive(Debug, Clone)]
pub struct RunStats {
    pub seed: u64,
    pub episodes: usize,
    pub mean_return: f64,
    pub mean_energy: f64,
    pub mean_steps: f64,
    pub mean_sim_time: f64,
    pub success_rate: f64,
}

/// Statistics over the runs of one algorithm.
#[derive(Debug, Clone)]
pub struct AlgoStats {
    pub algo: String,
    pub runs: Vec<RunStats>,
    pub mean_return: f64,
    pub std_return: f64,
    pub mean_energy: f64,
    pub std_energy: f64,
    pub mean_sim_time: f64,
    pub std_sim_time: f64,
    /// Median over runs of the per-run mean steps per episode.
    pub median_steps: f64,
    pub median_energy: f64,
    pub median_sim_time: f64,
    pub median_success_rate: f64,
}

#[derive(Debug, Clone)]
pub struct CompareSummary {
    pub algos: Vec<AlgoStats>,
    /// `median_energy(seac) / median_energy(sac_fixed)` when both present.
    pub energy_ratio: Option<f64>,
    /// Same ratio on mean steps per episode.
    pub steps_ratio: Option<f64>,
}

pub fn compare(paths: &[impl AsRef<Path>]) -> Result<CompareSummary, HarnessError> {
    if paths.is_empty() {
        return Err(HarnessError::Config("compare needs at least one eval file".into()));
    }
    let mut by_algo: BTreeMap<String, Vec<RunStats>> = BTreeMap::new();
    for path in paths {
        let (meta, records) = read_eval_file(path.as_ref())?;
        if records.is_empty() {
            return Err(HarnessError::Parse(format!(
                "{}: no evaluation rows",
                path.as_ref().display()
            )));
        }
        let n = records.len() as f64;
        by_algo.entry(meta.algo.clone()).or_default().push(RunStats {
            seed: meta.seed,
            episodes: records.len(),
            mean_return: records.iter().map(|r| r.ret).sum::<f64>() / n,
            mean_energy: records.iter().map(|r| r.energy).sum::<f64>() / n,
            mean_steps: records.iter().map(|r| r.steps as f64).sum::<f64>() / n,
            mean_sim_time: records.iter().map(|r| r.sim_time).sum::<f64>() / n,
            success_rate: records
                .iter()
                .filter(|r| r.outcome == Termination::GoalReached)
                .count() as f64
                / n,
        });
    }
    let algos: Vec<AlgoStats> = by_algo
        .into_iter()
        .map(|(algo, runs)| {
            let rets: Vec<f64> = runs.iter().map(|r| r.mean_return).collect();
            let energies: Vec<f64> = runs.iter().map(|r| r.mean_energy).collect();
            let steps: Vec<f64> = runs.iter().map(|r| r.mean_steps).collect();
            let sims: Vec<f64> = runs.iter().map(|r| r.mean_sim_time).collect();
            let succ: Vec<f64> = runs.iter().map(|r| r.success_rate).collect();
            let (mean_return, std_return) = mean_std(&rets);
            let (mean_energy, std_energy) = mean_std(&energies);
            let (mean_sim_time, std_sim_time) = mean_std(&sims);
            AlgoStats {
                algo,
                mean_return,
                std_return,
                mean_energy,
                std_energy,
                mean_sim_time,
                std_sim_time,
                median_steps: median(&steps),
                median_energy: median(&energies),
                median_sim_time: median(&sims),
                median_success_rate: median(&succ),
                runs,
            }
        })
        .collect();

    let find = |name: &str| algos.iter().find(|a| a.algo == name);
    let ratio = |f: fn(&AlgoStats) -> f64| match (find("seac"), find("sac_fixed")) {
        (Some(s), Some(b)) if f(b) != 0.0 => Some(f(s) / f(b)),
        _ => None,
    };
    Ok(CompareSummary {
        energy_ratio: ratio(|a| a.median_energy),
        steps_ratio: ratio(|a| a.median_steps),
        algos,
    })
}

impl CompareSummary {
    pub fn format_table(&self) -> String {
        let mut s = String::new();
        s.push_str("algo       runs  return(mean±std)    energy(mean±std)    sim_time(mean±std)  med_steps  med_success\n");
        for a in &self.algos {
            s.push_str(&format!(
                "{:<10} {:>4}  {:>8.2} ± {:<8.2} {:>8.2} ± {:<8.2} {:>8.3} ± {:<8.3} {:>9.2} {:>11.2}\n",
                a.algo,
                a.runs.len(),
                a.mean_return,
                a.std_return,
                a.mean_energy,
                a.std_energy,
                a.mean_sim_time,
                a.std_sim_time,
                a.median_steps,
                a.median_success_rate,
            ));
        }
        match self.energy_ratio {
            Some(r) => s.push_str(&format!("energy_ratio (seac / sac_fixed, median): {r:.4}\n")),
            None => s.push_str("energy_ratio: n/a (needs both seac and sac_fixed runs)\n"),
        }
        if let Some(r) = self.steps_ratio {
            s.push_str(&format!("steps_ratio  (seac / sac_fixed, median): {r:.4}\n"));
        }
        s
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite stat"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::metrics::{write_eval_file, EvalMeta, EvalRecord};
    use std::path::PathBuf;

    fn synthetic(dir: &Path, algo: &str, seed: u64, steps: &[u32]) -> PathBuf {
        let records: Vec<EvalRecord> = steps
            .iter()
            .enumerate()
            .map(|(i, &st)| EvalRecord {
                episode: i as u32,
                ret: 90.0 - st as f64,
                steps: st,
                energy: st as f64,
                sim_time: 0.2 * st as f64,
                outcome: Termination::GoalReached,
            })
            .collect();
        let path = dir.join(format!("{algo}_{seed}.csv"));
        let meta = EvalMeta {
            algo: algo.into(),
            seed,
            episodes: records.len() as u32,
            trained_steps: 0,
        };
        write_eval_file(&path, &meta, &records).unwrap();
        path
    }

    #[test]
    fn identical_files_give_ratio_one() {
        let dir = tempfile::tempdir().unwrap();
        let a = synthetic(dir.path(), "seac", 1, &[10, 20, 30]);
        let b = synthetic(dir.path(), "sac_fixed", 1, &[10, 20, 30]);
        let s = compare(&[a, b]).unwrap();
        assert_eq!(s.energy_ratio, Some(1.0));
        assert_eq!(s.steps_ratio, Some(1.0));
    }

    #[test]
    fn scripted_means_give_exact_ratio() {
        let dir = tempfile::tempdir().unwrap();
        // seac runs: mean steps 15 and 25 -> median 20
        // fixed runs: mean steps 40 and 40 -> median 40
        let files = vec![
            synthetic(dir.path(), "seac", 1, &[10, 20]),
            synthetic(dir.path(), "seac", 2, &[20, 30]),
            synthetic(dir.path(), "sac_fixed", 1, &[40, 40]),
            synthetic(dir.path(), "sac_fixed", 2, &[35, 45]),
        ];
        let s = compare(&files).unwrap();
        assert_eq!(s.steps_ratio, Some(0.5));
        assert_eq!(s.energy_ratio, Some(0.5));
        let seac = s.algos.iter().find(|a| a.algo == "seac").unwrap();
        assert_eq!(seac.runs.len(), 2);
        assert!((seac.mean_energy - 20.0).abs() < 1e-12);
    }

    #[test]
    fn missing_file_is_an_error() {
        let err = compare(&[Path::new("/no/such/file.csv")]).unwrap_err();
        assert!(err.to_string().contains("file.csv"));
    }

    #[test]
    fn single_algo_has_no_ratio() {
        let dir = tempfile::tempdir().unwrap();
        let a = synthetic(dir.path(), "seac", 1, &[10]);
        let s = compare(&[a]).unwrap();
        assert!(s.energy_ratio.is_none());
        assert!(s.format_table().contains("n/a"));
    }
}
