//! Event-stream metrics: trend sequences, author activity, retweet credit and
//! the correlations that relate them to trend duration.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::estimators::pearson;
use crate::types::{IntervalIndex, TrendSequence, TweetRecord};

/// Trending intervals of every topic.
pub type Appearances = BTreeMap<String, Vec<IntervalIndex>>;

/// Splits each topic's trending intervals into maximal runs of consecutive
/// indices. Output is ordered by topic, then start.
pub fn split_sequences(appearances: &Appearances) -> Vec<TrendSequence> {
    let mut out = Vec::new();
    for (topic, intervals) in appearances {
        let mut sorted = intervals.clone();
        sorted.sort_unstable();
        sorted.dedup();
        let mut iter = sorted.into_iter();
        let Some(first) = iter.next() else { continue };
        let (mut start, mut prev) = (first, first);
        for t in iter {
            if t.0 != prev.0 + 1 {
                out.push(run(topic, start, prev));
                start = t;
            }
            prev = t;
        }
        out.push(run(topic, start, prev));
    }
    out
}

fn run(topic: &str, start: IntervalIndex, last: IntervalIndex) -> TrendSequence {
    TrendSequence::new(topic, start, last.0 - start.0 + 1).expect("runs are non-empty")
}

/// Histograms of sequences per topic and of sequence lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceDistributions {
    pub counts_per_topic: BTreeMap<usize, usize>,
    pub lengths: BTreeMap<usize, usize>,
    pub topics: usize,
    pub sequences: usize,
    pub multi_sequence_fraction: f64,
}

pub fn sequence_distributions(sequences: &[TrendSequence]) -> Result<SequenceDistributions> {
    if sequences.is_empty() {
        return Err(Error::InsufficientSample {
            what: "trend sequences",
            needed: 1,
            got: 0,
        });
    }
    let mut per_topic: BTreeMap<&str, usize> = BTreeMap::new();
    let mut lengths = BTreeMap::new();
    for s in sequences {
        *per_topic.entry(&s.topic).or_default() += 1;
        *lengths.entry(s.length).or_default() += 1;
    }
    let mut counts_per_topic = BTreeMap::new();
    for &c in per_topic.values() {
        *counts_per_topic.entry(c).or_default() += 1;
    }
    let multi = per_topic.values().filter(|&&c| c > 1).count();
    Ok(SequenceDistributions {
        counts_per_topic,
        lengths,
        topics: per_topic.len(),
        sequences: sequences.len(),
        multi_sequence_fraction: multi as f64 / per_topic.len() as f64,
    })
}

/// a_q = tweets / unique authors.
pub fn active_ratio(tweets: &[TweetRecord]) -> Result<f64> {
    if tweets.is_empty() {
        return Err(Error::InsufficientSample {
            what: "tweets for active ratio",
            needed: 1,
            got: 0,
        });
    }
    let authors: HashSet<&str> = tweets.iter().map(|t| t.author.as_str()).collect();
    Ok(tweets.len() as f64 / authors.len() as f64)
}

/// Share of a topic's retweets credited to its most-retweeted author.
pub fn domination_ratio(tweets: &[TweetRecord]) -> Result<f64> {
    let mut credit: HashMap<&str, u64> = HashMap::new();
    for src in tweets.iter().filter_map(TweetRecord::credited) {
        *credit.entry(src).or_default() += 1;
    }
    let total: u64 = credit.values().sum();
    match credit.values().max() {
        Some(&top) if total > 0 => Ok(top as f64 / total as f64),
        _ => Err(Error::UndefinedDomination {
            topic: tweets.first().map(|t| t.topic.clone()).unwrap_or_default(),
        }),
    }
}

/// Retweets received per topic retweeted in.
pub fn retweet_ratio(retweets: u64, topics: u64) -> Result<f64> {
    if topics == 0 {
        return Err(Error::domain("retweet ratio needs at least one topic"));
    }
    Ok(retweets as f64 / topics as f64)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuthorStats {
    pub author: String,
    pub tweet_count: u64,
    /// Topics in whose pre-trend initiator set the author appears.
    pub topics_initiated: u64,
    pub topics_retweeted_in: u64,
    pub retweets_received: u64,
    pub followers: Option<u64>,
    pub tweet_rate: Option<f64>,
}

impl AuthorStats {
    pub fn retweet_ratio(&self) -> Option<f64> {
        retweet_ratio(self.retweets_received, self.topics_retweeted_in).ok()
    }
}

/// Per-author activity over a stream. `initiators` maps topics to their
/// initiating authors (see [`first_k_initiators`]). The last seen
/// `followers` / `tweet_rate` values of an author's own records are kept.
pub fn author_stats(stream: &[TweetRecord], initiators: &BTreeMap<String, Vec<String>>) -> Vec<AuthorStats> {
    let mut stats: BTreeMap<&str, AuthorStats> = BTreeMap::new();
    let mut credited_topics: HashMap<&str, HashSet<&str>> = HashMap::new();
    fn entry<'a, 'm>(stats: &'m mut BTreeMap<&'a str, AuthorStats>, name: &'a str) -> &'m mut AuthorStats {
        stats.entry(name).or_insert_with(|| AuthorStats {
            author: name.to_string(),
            ..AuthorStats::default()
        })
    }
    for t in stream {
        let a = entry(&mut stats, &t.author);
        a.tweet_count += 1;
        a.followers = t.followers.or(a.followers);
        a.tweet_rate = t.tweet_rate.or(a.tweet_rate);
        if let Some(src) = t.credited() {
            entry(&mut stats, src).retweets_received += 1;
            credited_topics.entry(src).or_default().insert(&t.topic);
        }
    }
    for authors in initiators.values() {
        let unique: BTreeSet<&str> = authors.iter().map(String::as_str).collect();
        for a in unique {
            if let Some(s) = stats.get_mut(a) {
                s.topics_initiated += 1;
            }
        }
    }
    stats
        .into_values()
        .map(|mut s| {
            s.topics_retweeted_in = credited_topics.get(s.author.as_str()).map_or(0, |t| t.len() as u64);
            s
        })
        .collect()
}

/// Authors credited with retweets in at least `min_topics` topics, by
/// retweet ratio, then retweets received (both descending), then author id.
pub fn top_retweeted(stream: &[TweetRecord], min_topics: u64) -> Vec<AuthorStats> {
    let mut ranked: Vec<AuthorStats> = author_stats(stream, &BTreeMap::new())
        .into_iter()
        .filter(|a| a.topics_retweeted_in >= min_topics.max(1))
        .collect();
    ranked.sort_by(compare_retweeted);
    ranked
}

fn compare_retweeted(a: &AuthorStats, b: &AuthorStats) -> Ordering {
    // Cross-multiplied ratios compare exactly.
    let lhs = u128::from(b.retweets_received) * u128::from(a.topics_retweeted_in);
    let rhs = u128::from(a.retweets_received) * u128::from(b.topics_retweeted_in);
    lhs.cmp(&rhs)
        .then(b.retweets_received.cmp(&a.retweets_received))
        .then_with(|| a.author.cmp(&b.author))
}

/// The first `k` distinct authors who tweeted before interval `trend_start`,
/// in order of first appearance. `tweets` must be time-sorted.
pub fn first_k_initiators(tweets: &[TweetRecord], trend_start: IntervalIndex, origin: u64, k: usize) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for t in tweets {
        if out.len() >= k || IntervalIndex::from_time(t.time, origin).is_none_or(|i| i >= trend_start) {
            break;
        }
        if seen.insert(t.author.as_str()) {
            out.push(t.author.clone());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopicMetrics {
    pub topic: String,
    pub total_tweets: u64,
    pub unique_authors: u64,
    pub active_ratio: f64,
    pub retweet_count: u64,
    /// None when the topic has no retweets.
    pub domination_ratio: Option<f64>,
    /// Trending intervals summed over all of the topic's sequences.
    pub trend_duration: u64,
    pub sequence_count: u64,
}

/// Metrics of every topic that has both tweets and at least one sequence.
pub fn topic_metrics(stream: &[TweetRecord], sequences: &[TrendSequence]) -> Vec<TopicMetrics> {
    let mut by_topic: BTreeMap<&str, Vec<TweetRecord>> = BTreeMap::new();
    for t in stream {
        by_topic.entry(&t.topic).or_default().push(t.clone());
    }
    let mut runs: HashMap<&str, (u64, u64)> = HashMap::new();
    for s in sequences {
        let e = runs.entry(&s.topic).or_default();
        e.0 += s.length as u64;
        e.1 += 1;
    }
    by_topic
        .into_iter()
        .filter_map(|(topic, tweets)| {
            let &(duration, count) = runs.get(topic)?;
            let unique: HashSet<&str> = tweets.iter().map(|t| t.author.as_str()).collect();
            Some(TopicMetrics {
                topic: topic.to_string(),
                total_tweets: tweets.len() as u64,
                unique_authors: unique.len() as u64,
                active_ratio: active_ratio(&tweets).ok()?,
                retweet_count: tweets.iter().filter(|t| t.is_retweet).count() as u64,
                domination_ratio: domination_ratio(&tweets).ok(),
                trend_duration: duration,
                sequence_count: count,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum CorrelationEntry {
    Coefficient {
        value: f64,
        n: usize,
    },
    /// Constant column, too few rows, or the field is missing everywhere.
    Undefined {
        reason: String,
        n: usize,
    },
}

impl CorrelationEntry {
    pub fn value(&self) -> Option<f64> {
        match self {
            CorrelationEntry::Coefficient { value, .. } => Some(*value),
            CorrelationEntry::Undefined { .. } => None,
        }
    }
}

/// Pairings reported by [`correlation_report`], in output order.
pub const CORRELATION_PAIRS: [&str; 6] = [
    "unique_authors~trend_duration",
    "total_tweets~unique_authors",
    "retweet_count~trend_duration",
    "domination_ratio~trend_duration",
    "tweet_rate~topics_initiated",
    "followers~topics_initiated",
];

pub fn correlation_report(metrics: &[TopicMetrics], authors: &[AuthorStats]) -> BTreeMap<String, CorrelationEntry> {
    let col = |f: &dyn Fn(&TopicMetrics) -> Option<f64>, g: &dyn Fn(&TopicMetrics) -> f64| {
        metrics
            .iter()
            .filter_map(|m| f(m).map(|x| (x, g(m))))
            .unzip::<f64, f64, Vec<_>, Vec<_>>()
    };
    let duration = |m: &TopicMetrics| m.trend_duration as f64;
    let authors_col = |f: &dyn Fn(&AuthorStats) -> Option<f64>| {
        authors
            .iter()
            .filter_map(|a| f(a).map(|x| (x, a.topics_initiated as f64)))
            .unzip::<f64, f64, Vec<_>, Vec<_>>()
    };
    let columns = [
        col(&|m| Some(m.unique_authors as f64), &duration),
        col(&|m| Some(m.total_tweets as f64), &|m| m.unique_authors as f64),
        col(&|m| Some(m.retweet_count as f64), &duration),
        col(&|m| m.domination_ratio, &duration),
        authors_col(&|a| a.tweet_rate),
        authors_col(&|a| a.followers.map(|f| f as f64)),
    ];
    CORRELATION_PAIRS
        .iter()
        .zip(columns)
        .map(|(name, (x, y))| {
            let n = x.len();
            let entry = match pearson(&x, &y) {
                Ok(value) => CorrelationEntry::Coefficient { value, n },
                Err(e) => CorrelationEntry::Undefined {
                    reason: e.to_string(),
                    n,
                },
            };
            (name.to_string(), entry)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn appear(list: &[(&str, &[usize])]) -> Appearances {
        list.iter()
            .map(|(t, v)| (t.to_string(), v.iter().map(|&i| IntervalIndex(i)).collect()))
            .collect()
    }

    fn lengths(seqs: &[TrendSequence]) -> Vec<usize> {
        seqs.iter().map(|s| s.length).collect()
    }

    #[test]
    fn split_examples() {
        assert_eq!(
            lengths(&split_sequences(&appear(&[("a", &[0, 1, 2, 5, 6])]))),
            vec![3, 2]
        );
        assert_eq!(lengths(&split_sequences(&appear(&[("a", &[4])]))), vec![1]);
        assert_eq!(lengths(&split_sequences(&appear(&[("a", &[0, 2, 4])]))), vec![1, 1, 1]);
    }

    #[test]
    fn distribution_examples() {
        let d = sequence_distributions(&split_sequences(&appear(&[("A", &[0, 1]), ("B", &[0, 3])]))).unwrap();
        assert_eq!(d.counts_per_topic, BTreeMap::from([(1, 1), (2, 1)]));
        assert_eq!(d.multi_sequence_fraction, 0.5);
        let singles = sequence_distributions(&split_sequences(&appear(&[("A", &[0, 2, 4]), ("B", &[7])]))).unwrap();
        assert_eq!(singles.lengths, BTreeMap::from([(1, 4)]));
        assert!(sequence_distributions(&[]).is_err());
    }

    fn tw(author: &str) -> TweetRecord {
        TweetRecord::tweet("q", author, 0).unwrap()
    }

    fn rt(author: &str, src: &str) -> TweetRecord {
        TweetRecord::retweet("q", author, 0, src).unwrap()
    }

    #[test]
    fn active_ratio_examples() {
        let tweets: Vec<_> = (0..100).map(|i| tw(&format!("u{}", i % 25))).collect();
        assert_eq!(active_ratio(&tweets).unwrap(), 4.0);
        let distinct: Vec<_> = (0..9).map(|i| tw(&format!("u{i}"))).collect();
        assert_eq!(active_ratio(&distinct).unwrap(), 1.0);
        assert_eq!(active_ratio(&vec![tw("solo"); 7]).unwrap(), 7.0);
        assert!(active_ratio(&[]).is_err());
    }

    #[test]
    fn domination_examples() {
        let mut tweets: Vec<_> = (0..8).map(|i| rt(&format!("f{i}"), "A")).collect();
        tweets.extend((0..2).map(|i| rt(&format!("g{i}"), "B")));
        tweets.push(tw("x"));
        assert!((domination_ratio(&tweets).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(domination_ratio(&[rt("f", "A")]).unwrap(), 1.0);
        assert!(matches!(
            domination_ratio(&[tw("x")]),
            Err(Error::UndefinedDomination { .. })
        ));
    }

    #[test]
    fn retweet_ratio_guard() {
        assert!(retweet_ratio(5, 0).is_err());
        assert_eq!(retweet_ratio(0, 3).unwrap(), 0.0);
    }

    #[test]
    fn initiators() {
        let at = |a: &str, t| TweetRecord::tweet("q", a, t).unwrap();
        let tweets = [at("A", 100), at("B", 200), at("A", 300), at("C", 400), at("D", 2500)];
        let start = IntervalIndex(1);
        assert_eq!(first_k_initiators(&tweets, start, 0, 3), vec!["A", "B", "C"]);
        assert_eq!(first_k_initiators(&tweets, start, 0, 2), vec!["A", "B"]);
        assert_eq!(first_k_initiators(&tweets, start, 0, 100).len(), 3);
        assert!(first_k_initiators(&tweets, IntervalIndex(0), 0, 3).is_empty());
    }

    fn credit_stream(rows: &[(&str, u64, u64)]) -> Vec<TweetRecord> {
        let mut out = Vec::new();
        for (author, retweets, topics) in rows {
            for i in 0..*retweets {
                let topic = format!("t{}", i % topics);
                out.push(TweetRecord::retweet(topic, "fan", 0, *author).unwrap());
            }
        }
        out
    }

    #[test]
    fn top_retweeted_ordering() {
        let stream = credit_stream(&[("b", 10, 5), ("a", 10, 5), ("c", 30, 5), ("d", 4, 2), ("e", 20, 10)]);
        let names: Vec<String> = top_retweeted(&stream, 2).into_iter().map(|a| a.author).collect();
        // Ratios: c 6, a 2, b 2, e 2 (more retweets first), d 2 (fewest retweets).
        assert_eq!(names, vec!["c", "e", "a", "b", "d"]);
        assert!(top_retweeted(&stream, 11).is_empty());
    }

    #[test]
    fn metrics_and_report() {
        let mut stream = Vec::new();
        let mut app = Appearances::new();
        for q in 0..6usize {
            let topic = format!("q{q}");
            for i in 0..=q {
                stream.push(TweetRecord::tweet(&topic, format!("u{i}"), 0).unwrap());
            }
            stream.push(TweetRecord::retweet(&topic, "fan", 0, "u0").unwrap());
            app.insert(topic, (0..=q).map(IntervalIndex).collect());
        }
        let seqs = split_sequences(&app);
        let metrics = topic_metrics(&stream, &seqs);
        assert_eq!(metrics.len(), 6);
        let report = correlation_report(&metrics, &[]);
        // unique authors = q + 2, duration = q + 1.
        let r = report["unique_authors~trend_duration"].value().unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        // domination is 1 everywhere: constant column.
        assert!(report["domination_ratio~trend_duration"].value().is_none());
        assert!(matches!(
            report["followers~topics_initiated"],
            CorrelationEntry::Undefined { n: 0, .. }
        ));
    }

    proptest! {
        #[test]
        fn split_is_partition(set in prop::collection::btree_set(0usize..1000, 1..300)) {
            let app = appear(&[("q", &set.iter().copied().collect::<Vec<_>>())]);
            let seqs = split_sequences(&app);
            prop_assert_eq!(seqs.iter().map(|s| s.length).sum::<usize>(), set.len());
            for w in seqs.windows(2) {
                prop_assert!(w[0].end().0 < w[1].start.0);
            }
            let covered: Vec<usize> = seqs.iter().flat_map(|s| s.intervals().map(|i| i.0)).collect();
            prop_assert_eq!(covered, set.into_iter().collect::<Vec<_>>());
        }

        #[test]
        fn active_ratio_at_least_one(authors in prop::collection::vec(0u8..20, 1..200)) {
            let tweets: Vec<_> = authors.iter().map(|a| tw(&format!("u{a}"))).collect();
            let r = active_ratio(&tweets).unwrap();
            let distinct = authors.iter().collect::<HashSet<_>>().len() == authors.len();
            prop_assert!(r >= 1.0);
            prop_assert_eq!(r == 1.0, distinct);
        }

        #[test]
        fn merging_max_author_retweets_never_lowers_domination(
            credits in prop::collection::vec(0u8..5, 1..60), extra in 1usize..30,
        ) {
            let tweets: Vec<_> = credits.iter().map(|c| rt("fan", &format!("s{c}"))).collect();
            let before = domination_ratio(&tweets).unwrap();
            let mut counts: HashMap<String, usize> = HashMap::new();
            for t in &tweets { *counts.entry(t.credited().unwrap().to_string()).or_default() += 1; }
            let top = counts.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).unwrap().0.clone();
            let mut merged = tweets.clone();
            merged.extend((0..extra).map(|_| TweetRecord::retweet("other", "fan", 0, &top).unwrap()));
            prop_assert!(domination_ratio(&merged).unwrap() >= before - 1e-15);
        }

        #[test]
        fn ranking_is_total(rows in prop::collection::vec((0u8..6, 1u64..40, 1u64..6), 1..12)) {
            let named: Vec<(String, u64, u64)> = rows.iter().map(|(a, r, t)| (format!("a{a}"), *r, *t)).collect();
            let refs: Vec<(&str, u64, u64)> = named.iter().map(|(a, r, t)| (a.as_str(), *r, *t)).collect();
            let ranked = top_retweeted(&credit_stream(&refs), 1);
            for w in ranked.windows(2) {
                prop_assert_eq!(compare_retweeted(&w[0], &w[1]), Ordering::Less);
            }
        }

        #[test]
        fn retweet_fraction_in_unit_interval(flags in prop::collection::vec(any::<bool>(), 1..100)) {
            let tweets: Vec<_> = flags.iter().map(|&r| if r { rt("a", "b") } else { tw("a") }).collect();
            let frac = tweets.iter().filter(|t| t.is_retweet).count() as f64 / tweets.len() as f64;
            prop_assert!((0.0..=1.0).contains(&frac));
        }
    }
}
