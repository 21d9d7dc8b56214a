//! Parsing, validation, and indexing of comment-event logs.
//!
//! The canonical on-disk format is JSON Lines, one event per line:
//!
//! ```text
//! {"user":"u1","platform":"facebook","item":"p9","category":"conspiracy","ts":1388534400}
//! ```
//!
//! A CSV mirror with header `user,platform,item,category,ts` is accepted as
//! well. Malformed records are counted and skipped; a file where more than
//! 10% of records are malformed is rejected outright.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Fraction of malformed records above which a load aborts.
pub const MALFORMED_LIMIT: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Platform {
    Facebook,
    Youtube,
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Platform::Facebook => write!(f, "facebook"),
            Platform::Youtube => write!(f, "youtube"),
        }
    }
}

impl FromStr for Platform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "facebook" | "fb" => Ok(Platform::Facebook),
            "youtube" | "yt" => Ok(Platform::Youtube),
            other => Err(Error::InvalidConfig(format!("unknown platform {other:?}"))),
        }
    }
}

/// One of the two conflicting narratives a content item belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Science,
    Conspiracy,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::Science => write!(f, "science"),
            Category::Conspiracy => write!(f, "conspiracy"),
        }
    }
}

/// One user comment on one categorized content item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommentEvent {
    pub user: String,
    pub platform: Platform,
    pub item: String,
    pub category: Category,
    pub ts: u64,
}

/// Per-item action counts. `shares` is meaningful only on Facebook and
/// `views` only on YouTube; the other platform carries a zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemStats {
    pub item_id: String,
    pub platform: Platform,
    pub category: Category,
    pub comments: u64,
    pub likes: u64,
    pub shares: u64,
    pub views: u64,
}

impl ItemStats {
    fn platform_fields_valid(&self) -> bool {
        match self.platform {
            Platform::Facebook => self.views == 0,
            Platform::Youtube => self.shares == 0,
        }
    }
}

/// A validated, indexed event log. Immutable once built; all analysis
/// modules may read it concurrently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    /// Events in input order.
    pub events: Vec<CommentEvent>,
    /// Per-item aggregates derived from the events.
    pub items: BTreeMap<String, ItemStats>,
    /// Per-user event indices, sorted by `(ts, input order)`.
    pub users: BTreeMap<String, Vec<usize>>,
}

impl Dataset {
    pub fn from_events(events: Vec<CommentEvent>) -> Dataset {
        let mut items: BTreeMap<String, ItemStats> = BTreeMap::new();
        let mut users: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (idx, ev) in events.iter().enumerate() {
            items
                .entry(ev.item.clone())
                .or_insert_with(|| ItemStats {
                    item_id: ev.item.clone(),
                    platform: ev.platform,
                    category: ev.category,
                    comments: 0,
                    likes: 0,
                    shares: 0,
                    views: 0,
                })
                .comments += 1;
            users.entry(ev.user.clone()).or_default().push(idx);
        }
        for indices in users.values_mut() {
            // Stable sort keeps input order on timestamp ties.
            indices.sort_by_key(|&i| events[i].ts);
        }
        Dataset { events, items, users }
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Result of loading an event log: the dataset plus how many records were
/// rejected along the way.
#[derive(Debug)]
pub struct LoadReport {
    pub dataset: Dataset,
    pub malformed: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventFormat {
    Jsonl,
    Csv,
}

impl FromStr for EventFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(EventFormat::Jsonl),
            "csv" => Ok(EventFormat::Csv),
            other => Err(Error::InvalidConfig(format!("unknown format {other:?}"))),
        }
    }
}

/// Load and validate an event log.
pub fn load_events(path: &Path, format: EventFormat) -> Result<LoadReport> {
    let file = File::open(path)?;
    load_events_from(file, format)
}

/// Same as [`load_events`] but from any reader.
pub fn load_events_from<R: Read>(reader: R, format: EventFormat) -> Result<LoadReport> {
    let mut events = Vec::new();
    let mut malformed = 0usize;
    let mut total = 0usize;

    match format {
        EventFormat::Jsonl => {
            for line in BufReader::new(reader).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                total += 1;
                match serde_json::from_str::<CommentEvent>(&line) {
                    Ok(ev) => events.push(ev),
                    Err(_) => malformed += 1,
                }
            }
        }
        EventFormat::Csv => {
            let mut rdr = csv::Reader::from_reader(reader);
            for record in rdr.deserialize::<CommentEvent>() {
                total += 1;
                match record {
                    Ok(ev) => events.push(ev),
                    Err(_) => malformed += 1,
                }
            }
        }
    }

    if malformed as f64 > MALFORMED_LIMIT * total as f64 {
        return Err(Error::TooManyMalformed { malformed, total });
    }
    Ok(LoadReport {
        dataset: Dataset::from_events(events),
        malformed,
        total,
    })
}

/// Write events as JSON Lines (the canonical format).
pub fn write_events_jsonl<W: Write>(events: &[CommentEvent], writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for ev in events {
        serde_json::to_writer(&mut w, ev)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Write events as the CSV mirror.
pub fn write_events_csv<W: Write>(events: &[CommentEvent], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for ev in events {
        w.serialize(ev)?;
    }
    w.flush()?;
    Ok(())
}

/// Result of loading an item-stats table. A Facebook post and the YouTube
/// video it links share one `item_id`, so entries are keyed by
/// `(platform, item_id)` and returned sorted by that key.
#[derive(Debug)]
pub struct ItemLoad {
    pub items: Vec<ItemStats>,
    pub rejected: usize,
}

#[derive(Debug, Deserialize)]
struct RawItemRow {
    item_id: String,
    platform: String,
    category: String,
    comments: i64,
    likes: i64,
    shares: i64,
    views: i64,
}

/// Load per-item action counts from a CSV with header
/// `item_id,platform,category,comments,likes,shares,views`.
///
/// Rows with negative counts or platform-inconsistent fields are rejected
/// (and counted); a duplicate `item_id` aborts the load.
pub fn load_item_stats(path: &Path) -> Result<ItemLoad> {
    let file = File::open(path)?;
    load_item_stats_from(file)
}

pub fn load_item_stats_from<R: Read>(reader: R) -> Result<ItemLoad> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut items: BTreeMap<(Platform, String), ItemStats> = BTreeMap::new();
    let mut rejected = 0usize;

    for row in rdr.deserialize::<RawItemRow>() {
        let Ok(raw) = row else {
            rejected += 1;
            continue;
        };
        let (Ok(platform), Ok(category)) = (
            raw.platform.parse::<Platform>(),
            parse_category(&raw.category),
        ) else {
            rejected += 1;
            continue;
        };
        if raw.comments < 0 || raw.likes < 0 || raw.shares < 0 || raw.views < 0 {
            rejected += 1;
            continue;
        }
        let stats = ItemStats {
            item_id: raw.item_id.clone(),
            platform,
            category,
            comments: raw.comments as u64,
            likes: raw.likes as u64,
            shares: raw.shares as u64,
            views: raw.views as u64,
        };
        if !stats.platform_fields_valid() {
            rejected += 1;
            continue;
        }
        if items.insert((platform, raw.item_id.clone()), stats).is_some() {
            return Err(Error::DuplicateItem { item_id: raw.item_id });
        }
    }
    Ok(ItemLoad {
        items: items.into_values().collect(),
        rejected,
    })
}

fn parse_category(s: &str) -> Result<Category> {
    match s {
        "science" => Ok(Category::Science),
        "conspiracy" => Ok(Category::Conspiracy),
        other => Err(Error::InvalidConfig(format!("unknown category {other:?}"))),
    }
}

/// Write item stats as the CSV format [`load_item_stats`] reads.
pub fn write_item_stats_csv<'a, W, I>(items: I, writer: W) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a ItemStats>,
{
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["item_id", "platform", "category", "comments", "likes", "shares", "views"])?;
    for it in items {
        w.write_record(&[
            it.item_id.clone(),
            it.platform.to_string(),
            it.category.to_string(),
            it.comments.to_string(),
            it.likes.to_string(),
            it.shares.to_string(),
            it.views.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Read one numeric column from a CSV file with headers.
pub fn read_csv_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let Some(idx) = headers.iter().position(|h| h == column) else {
        return Err(Error::InvalidConfig(format!(
            "column {column:?} not found; file has {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    };
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let field = record.get(idx).unwrap_or("");
        let value: f64 = field
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("non-numeric value {field:?} in column {column:?}")))?;
        out.push(value);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(user: &str, platform: &str, item: &str, category: &str, ts: u64) -> String {
        format!(
            r#"{{"user":"{user}","platform":"{platform}","item":"{item}","category":"{category}","ts":{ts}}}"#
        )
    }

    #[test]
    fn loads_valid_jsonl() {
        let text = [
            line("u1", "facebook", "p1", "science", 10),
            line("u2", "facebook", "p2", "conspiracy", 20),
            line("u1", "facebook", "p2", "conspiracy", 30),
        ]
        .join("\n");
        let report = load_events_from(text.as_bytes(), EventFormat::Jsonl).unwrap();
        assert_eq!(report.dataset.events.len(), 3);
        assert_eq!(report.malformed, 0);
        assert_eq!(report.dataset.users.len(), 2);
        assert_eq!(report.dataset.users["u1"], vec![0, 2]);
        assert_eq!(report.dataset.items["p2"].comments, 2);
    }

    #[test]
    fn empty_file_is_empty_dataset() {
        let report = load_events_from(&b""[..], EventFormat::Jsonl).unwrap();
        assert!(report.dataset.is_empty());
        assert_eq!(report.dataset.users.len(), 0);
        assert_eq!(report.malformed, 0);
    }

    #[test]
    fn unknown_category_rejected_and_counted() {
        // One bad record in ten stays under the 10% abort limit.
        let mut lines: Vec<String> = (0..9)
            .map(|i| line(&format!("u{i}"), "youtube", "v1", "science", i))
            .collect();
        lines.push(line("u9", "youtube", "v2", "politics", 9));
        let text = lines.join("\n");
        let report = load_events_from(text.as_bytes(), EventFormat::Jsonl).unwrap();
        assert_eq!(report.malformed, 1);
        assert_eq!(report.dataset.events.len(), 9);
    }

    #[test]
    fn too_many_malformed_aborts() {
        let mut lines: Vec<String> = (0..8)
            .map(|i| line(&format!("u{i}"), "youtube", "v1", "science", i))
            .collect();
        lines.push(line("u8", "youtube", "v2", "politics", 8));
        lines.push("not json at all".to_string());
        let text = lines.join("\n");
        let err = load_events_from(text.as_bytes(), EventFormat::Jsonl).unwrap_err();
        match err {
            Error::TooManyMalformed { malformed, total } => {
                assert_eq!(malformed, 2);
                assert_eq!(total, 10);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn negative_ts_rejected() {
        let text = [
            line("u1", "facebook", "p1", "science", 1),
            r#"{"user":"u2","platform":"facebook","item":"p1","category":"science","ts":-5}"#.to_string(),
            line("u3", "facebook", "p1", "science", 2),
            line("u4", "facebook", "p1", "science", 3),
            line("u5", "facebook", "p1", "science", 4),
            line("u6", "facebook", "p1", "science", 5),
            line("u7", "facebook", "p1", "science", 6),
            line("u8", "facebook", "p1", "science", 7),
            line("u9", "facebook", "p1", "science", 8),
            line("u10", "facebook", "p1", "science", 9),
        ]
        .join("\n");
        let report = load_events_from(text.as_bytes(), EventFormat::Jsonl).unwrap();
        assert_eq!(report.malformed, 1);
    }

    #[test]
    fn csv_mirror_round_trips() {
        let events = vec![
            CommentEvent {
                user: "u1".into(),
                platform: Platform::Youtube,
                item: "v1".into(),
                category: Category::Conspiracy,
                ts: 42,
            },
            CommentEvent {
                user: "u2".into(),
                platform: Platform::Facebook,
                item: "p1".into(),
                category: Category::Science,
                ts: 43,
            },
        ];
        let mut buf = Vec::new();
        write_events_csv(&events, &mut buf).unwrap();
        let report = load_events_from(buf.as_slice(), EventFormat::Csv).unwrap();
        assert_eq!(report.dataset.events, events);
    }

    #[test]
    fn ties_broken_by_input_order() {
        let text = [
            line("u1", "facebook", "p1", "science", 5),
            line("u1", "facebook", "p2", "conspiracy", 5),
            line("u1", "facebook", "p3", "science", 1),
        ]
        .join("\n");
        let report = load_events_from(text.as_bytes(), EventFormat::Jsonl).unwrap();
        assert_eq!(report.dataset.users["u1"], vec![2, 0, 1]);
    }

    #[test]
    fn item_stats_parse_and_validate() {
        let csv = "item_id,platform,category,comments,likes,shares,views\n\
                   p1,facebook,science,5,10,2,0\n\
                   v1,youtube,conspiracy,3,7,0,100\n\
                   v2,youtube,science,1,1,4,50\n\
                   p2,facebook,science,-1,0,0,0\n";
        let load = load_item_stats_from(csv.as_bytes()).unwrap();
        assert_eq!(load.items.len(), 2);
        let p1 = load.items.iter().find(|i| i.item_id == "p1").unwrap();
        assert_eq!(p1.comments, 5);
        // v2 has shares on youtube, p2 a negative count.
        assert_eq!(load.rejected, 2);
    }

    #[test]
    fn duplicate_item_aborts() {
        let csv = "item_id,platform,category,comments,likes,shares,views\n\
                   p1,facebook,science,5,10,2,0\n\
                   p1,facebook,science,6,11,3,0\n";
        let err = load_item_stats_from(csv.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::DuplicateItem { .. }));
    }

    #[test]
    fn linked_pair_shares_item_id_across_platforms() {
        let csv = "item_id,platform,category,comments,likes,shares,views\n\
                   v1,facebook,science,5,10,2,0\n\
                   v1,youtube,science,30,70,0,900\n";
        let load = load_item_stats_from(csv.as_bytes()).unwrap();
        assert_eq!(load.items.len(), 2);
        assert_eq!(load.rejected, 0);
    }

    #[test]
    fn jsonl_round_trip_exact() {
        let text = [
            line("u1", "facebook", "p9", "conspiracy", 1388534400),
            line("u2", "youtube", "v3", "science", 17),
        ]
        .join("\n");
        let report = load_events_from(text.as_bytes(), EventFormat::Jsonl).unwrap();
        let mut buf = Vec::new();
        write_events_jsonl(&report.dataset.events, &mut buf).unwrap();
        let reloaded = load_events_from(buf.as_slice(), EventFormat::Jsonl).unwrap();
        assert_eq!(reloaded.dataset, report.dataset);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_event() -> impl Strategy<Value = CommentEvent> {
            (0..6u32, any::<bool>(), 0..8u32, any::<bool>(), 0..500u64).prop_map(
                |(user, fb, item, sci, ts)| CommentEvent {
                    user: format!("u{user}"),
                    platform: if fb { Platform::Facebook } else { Platform::Youtube },
                    item: format!("i{item}"),
                    category: if sci { Category::Science } else { Category::Conspiracy },
                    ts,
                },
            )
        }

        proptest! {
            #[test]
            fn jsonl_round_trip(events in prop::collection::vec(arb_event(), 0..40)) {
                let dataset = Dataset::from_events(events);
                let mut buf = Vec::new();
                write_events_jsonl(&dataset.events, &mut buf).unwrap();
                let reloaded = load_events_from(buf.as_slice(), EventFormat::Jsonl).unwrap();
                prop_assert_eq!(reloaded.dataset, dataset);
                prop_assert_eq!(reloaded.malformed, 0);
            }

            /// With distinct timestamps, the per-user ordering is the same
            /// whatever order records arrive in.
            #[test]
            fn user_order_invariant_under_permutation(
                base in prop::collection::vec(arb_event(), 1..30).prop_map(|mut events| {
                    for (i, ev) in events.iter_mut().enumerate() {
                        ev.ts = (i as u64) * 13 + 1;
                    }
                    events
                }),
                shuffled in Just(()).prop_flat_map(|_| any::<u64>()),
            ) {
                let canonical = Dataset::from_events(base.clone());
                let mut permuted = base;
                // Deterministic Fisher-Yates from the case's random word.
                let mut state = shuffled | 1;
                for i in (1..permuted.len()).rev() {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let j = (state >> 33) as usize % (i + 1);
                    permuted.swap(i, j);
                }
                let reordered = Dataset::from_events(permuted);
                for (user, indices) in &canonical.users {
                    let expect: Vec<u64> =
                        indices.iter().map(|&i| canonical.events[i].ts).collect();
                    let got: Vec<u64> = reordered.users[user]
                        .iter()
                        .map(|&i| reordered.events[i].ts)
                        .collect();
                    prop_assert_eq!(expect, got);
                }
            }
        }
    }
}
