//! Append-only `.wise-progress` log of game results.

use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::Path;

pub const PROGRESS_HEADER: &str =
    "timestamp_ms,game,level,completions,elapsed_ms,peak_grasp_n,peak_secondary_n,score";

#[derive(Debug, Clone, PartialEq)]
pub struct ProgressRecord {
    pub timestamp_ms: u64,
    /// `fork` or `grasp`.
    pub game: String,
    pub level: u8,
    pub completions: u32,
    pub elapsed_ms: u64,
    pub peak_grasp_n: f64,
    /// Peak poke/cut force for the fork game, peak lift for the grasp game.
    pub peak_secondary_n: f64,
    pub score: u32,
}

impl ProgressRecord {
    pub fn render(&self) -> String {
        format!(
            "{},{},{},{},{},{:.3},{:.3},{}",
            self.timestamp_ms,
            self.game,
            self.level,
            self.completions,
            self.elapsed_ms,
            self.peak_grasp_n,
            self.peak_secondary_n,
            self.score
        )
    }

    pub fn parse(line: &str) -> Option<ProgressRecord> {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return None;
        }
        Some(ProgressRecord {
            timestamp_ms: f[0].parse().ok()?,
            game: f[1].to_string(),
            level: f[2].parse().ok()?,
            completions: f[3].parse().ok()?,
            elapsed_ms: f[4].parse().ok()?,
            peak_grasp_n: f[5].parse().ok()?,
            peak_secondary_n: f[6].parse().ok()?,
            score: f[7].parse().ok()?,
        })
    }
}

/// Appends one record, writing the header first when the file is new or
/// empty.
pub fn append_progress(path: &Path, record: &ProgressRecord) -> io::Result<()> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut line = String::new();
    if file.metadata()?.len() == 0 {
        line.push_str(PROGRESS_HEADER);
        line.push('\n');
    }
    line.push_str(&record.render());
    line.push('\n');
    file.write_all(line.as_bytes())?;
    file.flush()
}

pub fn read_progress(text: &str) -> Vec<ProgressRecord> {
    text.lines().skip_while(|l| *l == PROGRESS_HEADER).filter_map(ProgressRecord::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_line() {
        let r = ProgressRecord {
            timestamp_ms: 1,
            game: "fork".into(),
            level: 2,
            completions: 4,
            elapsed_ms: 5000,
            peak_grasp_n: 12.5,
            peak_secondary_n: 3.25,
            score: 700,
        };
        assert_eq!(ProgressRecord::parse(&r.render()), Some(r));
    }
}
