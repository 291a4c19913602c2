//! Reading and checking input files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use lotdraw::engine::AssignmentPlan;
use lotdraw::model::{Job, JobId, Market, Region, Worker, WorkerId};
use lotdraw::procedures::QingPartition;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::CliError;

pub type Preferences = BTreeMap<WorkerId, Vec<JobId>>;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, &e))
}

/// Market file contents before the cross-field checks.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MarketFile {
    regions: Vec<Region>,
    workers: Vec<Worker>,
    jobs: Vec<Job>,
}

/// Shape errors exit as parse failures; id, region and rank conflicts as
/// validation failures.
pub fn load_market(path: &Path) -> Result<Market, CliError> {
    let file: MarketFile = read_json(path)?;
    Market::new(file.regions, file.workers, file.jobs)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

pub fn load_plan(path: &Path, market: &Market) -> Result<AssignmentPlan, CliError> {
    let plan: AssignmentPlan = read_json(path)?;
    plan.validate(market)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(plan)
}

pub fn load_partition(path: &Path, market: &Market) -> Result<QingPartition, CliError> {
    let partition: QingPartition = read_json(path)?;
    partition
        .validate(market)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(partition)
}

pub fn load_preferences(path: &Path) -> Result<Preferences, CliError> {
    read_json(path)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn to_pretty_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use lotdraw::experiments::gen_thm1;
    use tempfile::TempDir;

    fn file(dir: &TempDir, name: &str, contents: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, contents).unwrap();
        p
    }

    #[test]
    fn market_round_trips_through_its_file_format() {
        let dir = TempDir::new().unwrap();
        let case = gen_thm1(2).unwrap();
        let p = file(&dir, "m.json", &to_pretty_json(&case.market));
        assert_eq!(load_market(&p).unwrap(), case.market);
        let p = file(&dir, "p.json", &to_pretty_json(&case.plan));
        assert_eq!(load_plan(&p, &case.market).unwrap(), case.plan);
        let p = file(&dir, "q.json", &to_pretty_json(case.partition.as_ref().unwrap()));
        assert_eq!(&load_partition(&p, &case.market).unwrap(), case.partition.as_ref().unwrap());
    }

    #[test]
    fn shape_errors_are_parse_errors_with_location() {
        let dir = TempDir::new().unwrap();
        let p = file(&dir, "m.json", "{\n  \"regions\": [1]\n}");
        match load_market(&p).unwrap_err() {
            CliError::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn conflicts_are_validation_errors() {
        let dir = TempDir::new().unwrap();
        let p = file(
            &dir,
            "m.json",
            r#"{"regions": ["X", "X"], "workers": [], "jobs": []}"#,
        );
        assert_eq!(load_market(&p).unwrap_err().exit_code(), 3);

        let market = gen_thm1(1).unwrap().market;
        let p = file(&dir, "q.json", r#"{"wa1": [], "wa2": [], "wb1": [], "wb2": []}"#);
        assert_eq!(load_partition(&p, &market).unwrap_err().exit_code(), 3);
        let p = file(&dir, "plan.json", r#"{"worker_order": [], "job_orders": {}}"#);
        assert_eq!(load_plan(&p, &market).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn missing_files_are_io_errors() {
        let err = load_preferences(Path::new("/nonexistent/prefs.json")).unwrap_err();
        assert_eq!(err.exit_code(), 5);
    }
}
