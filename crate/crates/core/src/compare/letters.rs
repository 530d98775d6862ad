//! Compact letter display over a score-ordered system list.
//!
//! Each letter covers a maximal contiguous run `[i..=j]` of the ordered list
//! in which every pair is non-significant. Runs are generated left to right
//! and a run contained in an earlier one is absorbed. The letters are always
//! sound (systems sharing a letter are pairwise non-significant); a
//! non-significant pair that straddles a significant one may end up without a
//! shared letter, and such pairs are reported in `non_transitive_pairs`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedSystem {
    pub name: String,
    pub score: f64,
    pub letters: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LetterGroup {
    pub letter: String,
    /// Indices into the ordered system list.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LetterGrouping {
    pub systems: Vec<GroupedSystem>,
    pub groups: Vec<LetterGroup>,
    pub non_transitive_pairs: Vec<(usize, usize)>,
}

impl LetterGrouping {
    pub fn share_letter(&self, i: usize, j: usize) -> bool {
        self.groups
            .iter()
            .any(|g| g.members.contains(&i) && g.members.contains(&j))
    }
}

/// `a`..`z`, then `aa`, `ab`, ...
pub fn letter_name(mut idx: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'a' + (idx % 26) as u8);
        if idx < 26 {
            break;
        }
        idx = idx / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

/// Letter groups for `systems` (name, score) already ordered by descending
/// score; `significant[i][j]` says whether systems `i` and `j` differ.
#[allow(clippy::needless_range_loop)]
pub fn letter_groups(systems: &[(String, f64)], significant: &[Vec<bool>]) -> Result<LetterGrouping> {
    let k = systems.len();
    if significant.len() != k || significant.iter().any(|row| row.len() != k) {
        return Err(Error::Consistency(format!("significance matrix must be {k} x {k}")));
    }
    for i in 0..k {
        if significant[i][i] {
            return Err(Error::Consistency(format!(
                "significance matrix marks diagonal entry {i} significant"
            )));
        }
        for j in i + 1..k {
            if significant[i][j] != significant[j][i] {
                return Err(Error::Consistency(format!(
                    "significance matrix entries ({i}, {j}) and ({j}, {i}) disagree"
                )));
            }
        }
    }

    let mut runs: Vec<(usize, usize)> = Vec::new();
    for start in 0..k {
        let mut end = start;
        while end + 1 < k && (start..=end).all(|m| !significant[m][end + 1]) {
            end += 1;
        }
        if !runs.iter().any(|&(s, e)| s <= start && end <= e) {
            runs.push((start, end));
        }
    }

    let groups: Vec<LetterGroup> = runs
        .iter()
        .enumerate()
        .map(|(idx, &(s, e))| LetterGroup {
            letter: letter_name(idx),
            members: (s..=e).collect(),
        })
        .collect();

    let systems_out = systems
        .iter()
        .enumerate()
        .map(|(i, (name, score))| GroupedSystem {
            name: name.clone(),
            score: *score,
            letters: groups
                .iter()
                .filter(|g| g.members.contains(&i))
                .map(|g| g.letter.as_str())
                .collect(),
        })
        .collect();

    let mut grouping = LetterGrouping {
        systems: systems_out,
        groups,
        non_transitive_pairs: Vec::new(),
    };
    for i in 0..k {
        for j in i + 1..k {
            if !significant[i][j] && !grouping.share_letter(i, j) {
                grouping.non_transitive_pairs.push((i, j));
            }
        }
    }
    Ok(grouping)
}
