//! Newline-delimited JSON graph files.
//!
//! One graph per line: `{"n": int, "edges": [[i,j],...], "weights": [w,...],
//! "features": [[f,...],...]}` with 0-based indices, i < j per edge, and the
//! optional fields omitted when absent.

use crate::error::{Result, SfmgError};
use crate::graph::Graph;
use crate::numerics::Matrix;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[derive(Serialize, Deserialize)]
struct GraphRecord {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    features: Option<Vec<Vec<f64>>>,
}

impl GraphRecord {
    fn from_graph(g: &Graph) -> Self {
        let edges = g.edges();
        let all_unit = edges.iter().all(|&(_, _, w)| w == 1);
        let weights = if all_unit {
            None
        } else {
            Some(edges.iter().map(|&(_, _, w)| w).collect())
        };
        let features = g
            .features()
            .map(|f| (0..f.rows()).map(|i| f.row(i).to_vec()).collect());
        GraphRecord {
            n: g.n(),
            edges: edges.iter().map(|&(i, j, _)| [i, j]).collect(),
            weights,
            features,
        }
    }

    fn into_graph(self, path: &str, line: usize) -> Result<Graph> {
        let parse_err = |msg: String| SfmgError::Parse {
            path: path.to_string(),
            line,
            msg,
        };
        if let Some(w) = &self.weights {
            if w.len() != self.edges.len() {
                return Err(parse_err(format!(
                    "{} weights for {} edges",
                    w.len(),
                    self.edges.len()
                )));
            }
        }
        let mut weighted = Vec::with_capacity(self.edges.len());
        for (idx, &[i, j]) in self.edges.iter().enumerate() {
            if i >= j {
                return Err(parse_err(format!("edge [{i},{j}] violates i < j")));
            }
            if j >= self.n {
                return Err(parse_err(format!(
                    "edge [{i},{j}] out of range for n={}",
                    self.n
                )));
            }
            let w = self.weights.as_ref().map_or(1, |ws| ws[idx]);
            weighted.push((i, j, w));
        }
        let mut g = Graph::from_weighted_edges(self.n, &weighted)
            .map_err(|e| parse_err(e.to_string()))?;
        if let Some(rows) = self.features {
            if rows.len() != self.n {
                return Err(parse_err(format!(
                    "{} feature rows for n={}",
                    rows.len(),
                    self.n
                )));
            }
            let features = Matrix::from_rows(&rows).map_err(|e| parse_err(e.to_string()))?;
            g = g.with_features(features).map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(g)
    }
}

pub fn write_graphs<P: AsRef<Path>>(path: P, graphs: &[Graph]) -> Result<()> {
    let file = std::fs::File::create(path.as_ref())?;
    let mut out = BufWriter::new(file);
    for g in graphs {
        serde_json::to_writer(&mut out, &GraphRecord::from_graph(g))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_graphs<P: AsRef<Path>>(path: P) -> Result<Vec<Graph>> {
    let display = path.as_ref().display().to_string();
    let file = std::fs::File::open(path.as_ref())?;
    let reader = BufReader::new(file);
    let mut graphs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: GraphRecord = serde_json::from_str(&line).map_err(|e| SfmgError::Parse {
            path: display.clone(),
            line: idx + 1,
            msg: e.to_string(),
        })?;
        graphs.push(record.into_graph(&display, idx + 1)?);
    }
    Ok(graphs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_plain_and_weighted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("graphs.jsonl");
        let g1 = Graph::from_edges(4, &[(0, 1), (1, 3)]).unwrap();
        let g2 = Graph::from_weighted_edges(3, &[(0, 1, 2), (1, 2, 3)]).unwrap();
        let g3 = Graph::from_edges(2, &[(0, 1)])
            .unwrap()
            .with_features(Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap())
            .unwrap();
        write_graphs(&path, &[g1.clone(), g2.clone(), g3.clone()]).unwrap();
        let back = read_graphs(&path).unwrap();
        assert_eq!(back, vec![g1, g2, g3]);
    }

    #[test]
    fn empty_file_gives_empty_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.jsonl");
        std::fs::write(&path, "").unwrap();
        assert!(read_graphs(&path).unwrap().is_empty());
    }

    #[test]
    fn out_of_range_edge_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        std::fs::write(
            &path,
            "{\"n\": 2, \"edges\": [[0,1]]}\n{\"n\": 2, \"edges\": [[0,5]]}\n",
        )
        .unwrap();
        match read_graphs(&path) {
            Err(SfmgError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad2.jsonl");
        std::fs::write(&path, "{\"n\": 2, \"edges\": [[0,1]]}\nnot json\n").unwrap();
        match read_graphs(&path) {
            Err(SfmgError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
