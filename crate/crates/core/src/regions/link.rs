use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::LaTable;
use crate::csvio;
use crate::error::{Error, Result};

/// Postcode to LA code, keyed by normalised postcode.
pub type PostcodeLookup = BTreeMap<String, String>;

/// Upper-cases and strips whitespace so `"ab1 2cd"` and `"AB12CD"` agree.
pub fn normalize_postcode(raw: &str) -> String {
    raw.chars()
        .filter(|c| !c.is_whitespace())
        .flat_map(char::to_uppercase)
        .collect()
}

/// Reads a `postcode,la_code` CSV.
pub fn read_postcode_lookup(path: &Path) -> Result<PostcodeLookup> {
    parse_postcode_lookup(&csvio::read_to_string(path)?, path)
}

pub(crate) fn parse_postcode_lookup(text: &str, source: &Path) -> Result<PostcodeLookup> {
    let mut rdr = csvio::reader_from_str(text);
    let h = rdr.headers()?.clone();
    let p = csvio::column(&h, "postcode", source)?;
    let c = csvio::column(&h, "la_code", source)?;
    let mut out = PostcodeLookup::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let key = normalize_postcode(csvio::field(&rec, p));
        let code = csvio::field(&rec, c).to_string();
        if let Some(prev) = out.insert(key.clone(), code.clone()) {
            if prev != code {
                return Err(Error::parse(
                    source,
                    row + 2,
                    format!("postcode {key} maps to both {prev} and {code}"),
                ));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RejectReason {
    NoKey,
    UnknownLaCode,
    UnknownPostcode,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::NoKey => "no_key",
            RejectReason::UnknownLaCode => "unknown_la_code",
            RejectReason::UnknownPostcode => "unknown_postcode",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinkOutcome {
    Matched(String),
    Rejected(RejectReason),
}

/// One record to be linked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkKey {
    pub id: String,
    pub la_code: Option<String>,
    pub postcode: Option<String>,
}

/// Reads `id[,la_code][,postcode]`; at least one key column must exist.
pub fn parse_link_keys(text: &str, source: &Path) -> Result<Vec<LinkKey>> {
    let mut rdr = csvio::reader_from_str(text);
    let h = rdr.headers()?.clone();
    let id = csvio::column(&h, "id", source)?;
    let code = csvio::column(&h, "la_code", source).ok();
    let post = csvio::column(&h, "postcode", source).ok();
    if code.is_none() && post.is_none() {
        return Err(Error::parse(
            source,
            1,
            "need an `la_code` or `postcode` column",
        ));
    }
    let opt = |rec: &csv::StringRecord, j: Option<usize>| {
        j.map(|j| csvio::field(rec, j).to_string())
            .filter(|v| !v.is_empty())
    };
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        out.push(LinkKey {
            id: csvio::field(&rec, id).to_string(),
            la_code: opt(&rec, code),
            postcode: opt(&rec, post),
        });
    }
    Ok(out)
}

pub fn read_link_keys(path: &Path) -> Result<Vec<LinkKey>> {
    parse_link_keys(&csvio::read_to_string(path)?, path)
}

/// Renders `(matched, rejects)` tables: `id,la_code` and `id,reason`.
pub fn write_link_results(keys: &[LinkKey], outcomes: &[LinkOutcome]) -> (String, String) {
    let mut matched = String::from("id,la_code\n");
    let mut rejects = String::from("id,reason\n");
    for (k, o) in keys.iter().zip(outcomes) {
        match o {
            LinkOutcome::Matched(c) => {
                let _ = writeln!(matched, "{},{c}", k.id);
            }
            LinkOutcome::Rejected(r) => {
                let _ = writeln!(rejects, "{},{}", k.id, r.as_str());
            }
        }
    }
    (matched, rejects)
}

/// Assigns each `(la_code, postcode)` key pair to a local authority: by code
/// when it is known, otherwise through the postcode lookup. Returns one
/// outcome per input, in order.
pub fn link_records(
    table: &LaTable,
    keys: &[(Option<String>, Option<String>)],
    lookup: &PostcodeLookup,
) -> Vec<LinkOutcome> {
    keys.iter()
        .map(|(code, postcode)| {
            let code = code.as_deref().map(str::trim).filter(|c| !c.is_empty());
            let postcode = postcode
                .as_deref()
                .map(normalize_postcode)
                .filter(|p| !p.is_empty());
            if let Some(c) = code {
                if table.contains(c) {
                    return LinkOutcome::Matched(c.to_string());
                }
            }
            match (&postcode, code) {
                (Some(p), _) => match lookup.get(p) {
                    Some(c) if table.contains(c) => LinkOutcome::Matched(c.clone()),
                    Some(_) => LinkOutcome::Rejected(RejectReason::UnknownLaCode),
                    None if code.is_some() => LinkOutcome::Rejected(RejectReason::UnknownLaCode),
                    None => LinkOutcome::Rejected(RejectReason::UnknownPostcode),
                },
                (None, Some(_)) => LinkOutcome::Rejected(RejectReason::UnknownLaCode),
                (None, None) => LinkOutcome::Rejected(RejectReason::NoKey),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::LaRegion;

    fn table() -> LaTable {
        LaTable::new(vec![
            LaRegion {
                code: "E06000001".into(),
                name: "Hartlepool".into(),
                area_km2: 93.7,
            },
            LaRegion {
                code: "W06000015".into(),
                name: "Cardiff".into(),
                area_km2: 140.3,
            },
        ])
        .unwrap()
    }

    fn key(c: Option<&str>, p: Option<&str>) -> (Option<String>, Option<String>) {
        (c.map(String::from), p.map(String::from))
    }

    #[test]
    fn link_keys_and_result_tables() {
        let keys = parse_link_keys(
            "id,la_code,postcode\nr1,E06000001,\nr2,,ZZ9 9ZZ\nr3,,\n",
            Path::new("k.csv"),
        )
        .unwrap();
        assert_eq!(keys[1].postcode.as_deref(), Some("ZZ9 9ZZ"));
        assert_eq!(keys[2].la_code, None);
        assert!(parse_link_keys("id\nr1\n", Path::new("k.csv")).is_err());
        let outcomes = vec![
            LinkOutcome::Matched("E06000001".into()),
            LinkOutcome::Rejected(RejectReason::UnknownPostcode),
            LinkOutcome::Rejected(RejectReason::NoKey),
        ];
        let (m, r) = write_link_results(&keys, &outcomes);
        assert_eq!(m, "id,la_code\nr1,E06000001\n");
        assert_eq!(r.lines().count(), 3);
    }

    #[test]
    fn link_paths() {
        let lookup: PostcodeLookup = [
            ("CF101AA".to_string(), "W06000015".to_string()),
            ("ZZ11ZZ".to_string(), "S99999999".to_string()),
        ]
        .into();
        let out = link_records(
            &table(),
            &[
                key(Some("E06000001"), None),
                key(None, Some("cf10 1aa")),
                key(None, None),
                key(None, Some("XX1 1XX")),
                key(Some("E99999999"), None),
                key(None, Some("ZZ1 1ZZ")),
                key(Some("E99999999"), Some("CF10 1AA")),
            ],
            &lookup,
        );
        assert_eq!(out[0], LinkOutcome::Matched("E06000001".into()));
        assert_eq!(out[1], LinkOutcome::Matched("W06000015".into()));
        assert_eq!(out[2], LinkOutcome::Rejected(RejectReason::NoKey));
        assert_eq!(out[3], LinkOutcome::Rejected(RejectReason::UnknownPostcode));
        assert_eq!(out[4], LinkOutcome::Rejected(RejectReason::UnknownLaCode));
        assert_eq!(out[5], LinkOutcome::Rejected(RejectReason::UnknownLaCode));
        assert_eq!(out[6], LinkOutcome::Matched("W06000015".into()));
        assert_eq!(out.len(), 7);
    }

    #[test]
    fn lookup_conflicts_rejected() {
        let text = "postcode,la_code\nAB1 2CD,E06000001\nab12cd,E06000002\n";
        assert!(parse_postcode_lookup(text, Path::new("pc.csv")).is_err());
        let ok =
            parse_postcode_lookup("postcode,la_code\nAB1 2CD,E06000001\n", Path::new("pc.csv"))
                .unwrap();
        assert_eq!(ok["AB12CD"], "E06000001");
    }
}
