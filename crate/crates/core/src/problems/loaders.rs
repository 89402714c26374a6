//! Readers for SNAP edge lists and MovieLens 1M rating files.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fl::{build_fl, FacilitySpec};
use super::im::{build_im, simulate_ic, DiGraph};
use super::Instance;
use crate::analytic::AnalyticKernel;
use crate::error::{input, Error, Result};
use crate::matroid::PartitionMatroid;
use crate::objective::ProblemKind;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn read_lossy(path: &Path) -> Result<String> {
    Ok(String::from_utf8_lossy(&std::fs::read(path)?).into_owned())
}

/// Graph from a SNAP edge list, with node ids remapped densely in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnapGraph {
    pub graph: DiGraph,
    /// Original id of each dense node.
    pub ids: Vec<u64>,
}

/// Whitespace-separated `from to` pairs; blank lines and `#` comments are skipped.
/// Self-loops and repeated edges are dropped.
pub fn parse_snap_edges(text: &str) -> Result<SnapGraph> {
    let mut raw = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(a), Some(b)) = (it.next(), it.next()) else {
            return Err(parse_err(no + 1, "expected two node ids"));
        };
        let a: u64 = a.parse().map_err(|_| parse_err(no + 1, format!("bad node id `{a}`")))?;
        let b: u64 = b.parse().map_err(|_| parse_err(no + 1, format!("bad node id `{b}`")))?;
        raw.push((a, b));
    }
    let mut ids: Vec<u64> = raw.iter().flat_map(|&(a, b)| [a, b]).collect();
    ids.sort_unstable();
    ids.dedup();
    let dense: HashMap<u64, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut seen = HashSet::new();
    let edges = raw
        .into_iter()
        .map(|(a, b)| (dense[&a], dense[&b]))
        .filter(|&(u, v)| u != v && seen.insert((u, v)))
        .collect();
    Ok(SnapGraph {
        graph: DiGraph::new(ids.len(), edges)?,
        ids,
    })
}

pub fn load_snap_edges(path: impl AsRef<Path>) -> Result<SnapGraph> {
    parse_snap_edges(&read_lossy(path.as_ref())?)
}

/// Subgraph induced by the `n` nodes of largest out-degree (ties by lowest index).
/// Kept nodes are renumbered in their original order; the second value maps new
/// indices to old ones.
pub fn top_out_degree_subgraph(graph: &DiGraph, n: usize) -> (DiGraph, Vec<usize>) {
    let deg = graph.out_degrees();
    let mut order: Vec<usize> = (0..graph.nodes).collect();
    order.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
    order.truncate(n);
    order.sort_unstable();
    let mut index = vec![usize::MAX; graph.nodes];
    for (i, &v) in order.iter().enumerate() {
        index[v] = i;
    }
    let edges = graph
        .edges
        .iter()
        .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
        .map(|&(u, v)| (index[u], index[v]))
        .collect();
    (
        DiGraph {
            nodes: order.len(),
            edges,
        },
        order,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EpinionsParams {
    pub nodes: usize,
    pub p: f64,
    pub cascades: usize,
    pub blocks: usize,
    pub k: usize,
}

impl Default for EpinionsParams {
    fn default() -> Self {
        EpinionsParams {
            nodes: 100,
            p: 0.02,
            cascades: 10,
            blocks: 2,
            k: 2,
        }
    }
}

/// Influence instance on the top out-degree subgraph; every node is a seed candidate.
pub fn social_im_instance(graph: &DiGraph, params: &EpinionsParams, seed: u64) -> Result<Instance> {
    let (sub, _) = top_out_degree_subgraph(graph, params.nodes);
    let cascades = simulate_ic(&sub, params.p, params.cascades, seed)?;
    let candidates: Vec<usize> = (0..sub.nodes).collect();
    Ok(Instance {
        name: "Epinions".into(),
        kind: ProblemKind::Im,
        objective: build_im(&cascades, &candidates, AnalyticKernel::log1p())?,
        matroid: PartitionMatroid::equal_blocks(sub.nodes, params.blocks, params.k)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rating {
    pub user: u64,
    pub movie: u64,
    pub rating: f64,
}

/// `UserID::MovieID::Rating::Timestamp` rows.
pub fn parse_movielens_ratings(text: &str) -> Result<Vec<Rating>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.trim().split("::").collect();
        if f.len() < 3 {
            return Err(parse_err(no + 1, "expected `user::movie::rating`"));
        }
        let user = f[0].parse().map_err(|_| parse_err(no + 1, "bad user id"))?;
        let movie = f[1].parse().map_err(|_| parse_err(no + 1, "bad movie id"))?;
        let rating = f[2].parse().map_err(|_| parse_err(no + 1, "bad rating"))?;
        out.push(Rating {
            user,
            movie,
            rating,
        });
    }
    Ok(out)
}

/// `MovieID::Title::Genre1|Genre2|...` rows, mapped to the first listed genre.
pub fn parse_movielens_movies(text: &str) -> Result<HashMap<u64, String>> {
    let mut out = HashMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let id = line.split("::").next().unwrap_or_default();
        let genres = line.rsplit("::").next().unwrap_or_default();
        if !line.contains("::") {
            return Err(parse_err(no + 1, "expected `movie::title::genres`"));
        }
        let id: u64 = id.parse().map_err(|_| parse_err(no + 1, "bad movie id"))?;
        let first = genres.split('|').next().unwrap_or_default().trim();
        out.insert(id, first.to_string());
    }
    Ok(out)
}

pub fn load_movielens_ratings(path: impl AsRef<Path>) -> Result<Vec<Rating>> {
    parse_movielens_ratings(&read_lossy(path.as_ref())?)
}

pub fn load_movielens_movies(path: impl AsRef<Path>) -> Result<HashMap<u64, String>> {
    parse_movielens_movies(&read_lossy(path.as_ref())?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MovieLensParams {
    pub users: usize,
    pub movies: usize,
    pub k: usize,
    /// Ratings are divided by this to land in `[0, 1]`.
    pub max_rating: f64,
}

impl Default for MovieLensParams {
    fn default() -> Self {
        MovieLensParams {
            users: 100,
            movies: 100,
            k: 4,
            max_rating: 5.0,
        }
    }
}

/// Facility location with movies as facilities and users as customers.
///
/// Users are the most active raters (ties by lowest id); movies are drawn uniformly
/// without replacement from those rated by the most active user. Movies are blocked
/// by first genre, each block with capacity `k`.
pub fn movielens_instance(
    ratings: &[Rating],
    genres: &HashMap<u64, String>,
    params: &MovieLensParams,
    seed: u64,
) -> Result<Instance> {
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for r in ratings {
        *counts.entry(r.user).or_default() += 1;
    }
    let mut users: Vec<(u64, usize)> = counts.into_iter().collect();
    users.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    users.truncate(params.users);
    let Some(&(top, _)) = users.first() else {
        return input("no ratings");
    };
    let mut pool: Vec<u64> = ratings.iter().filter(|r| r.user == top).map(|r| r.movie).collect();
    pool.sort_unstable();
    pool.dedup();
    let take = params.movies.min(pool.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut movies: Vec<u64> = sample(&mut rng, pool.len(), take).into_iter().map(|i| pool[i]).collect();
    movies.sort_unstable();

    let user_index: HashMap<u64, usize> = users.iter().enumerate().map(|(j, &(u, _))| (u, j)).collect();
    let movie_index: HashMap<u64, usize> = movies.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let triples = ratings.iter().filter_map(|r| {
        let i = *movie_index.get(&r.movie)?;
        let j = *user_index.get(&r.user)?;
        Some((i, j, (r.rating / params.max_rating).clamp(0.0, 1.0)))
    });
    let spec = FacilitySpec::from_triples(movies.len(), users.len(), triples)?;

    let mut block_ids: Vec<String> = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, m) in movies.iter().enumerate() {
        let g = genres.get(m).map_or("unknown", String::as_str);
        match block_ids.iter().position(|b| b == g) {
            Some(b) => blocks[b].push(i),
            None => {
                block_ids.push(g.to_string());
                blocks.push(vec![i]);
            }
        }
    }
    let caps = vec![params.k; blocks.len()];
    Ok(Instance {
        name: "MovieLens".into(),
        kind: ProblemKind::Fl,
        objective: build_fl(&spec, AnalyticKernel::log1p())?,
        matroid: PartitionMatroid::new(movies.len(), blocks, caps)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snap_parsing() {
        let g = parse_snap_edges("# header\n# more\n10 20\n20 30\n10 30\n10 10\n\n").unwrap();
        assert_eq!(g.ids, vec![10, 20, 30]);
        assert_eq!(g.graph.edges, vec![(0, 1), (1, 2), (0, 2)]);
        let err = parse_snap_edges("1 2\n3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn top_degree_subset() {
        let g = DiGraph::new(3, vec![(0, 1), (0, 2), (1, 2)]).unwrap();
        let (sub, kept) = top_out_degree_subgraph(&g, 2);
        assert_eq!(kept, vec![0, 1]);
        assert_eq!(sub.edges, vec![(0, 1)]);
    }

    #[test]
    fn movielens_rows() {
        let r = parse_movielens_ratings("1::1193::5::978300760\n1::661::3::978302109\n").unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].movie, 1193);
        assert_eq!(r[1].rating, 3.0);
        assert!(matches!(
            parse_movielens_ratings("1::2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        let m = parse_movielens_movies("1::Toy Story (1995)::Animation|Children's|Comedy\n").unwrap();
        assert_eq!(m[&1], "Animation");
    }

    #[test]
    fn movielens_subset() {
        let ratings = parse_movielens_ratings(
            "1::10::5::0\n1::11::4::0\n1::12::2::0\n2::10::3::0\n3::12::1::0\n2::13::5::0\n",
        )
        .unwrap();
        let genres = parse_movielens_movies("10::A::Drama\n11::B::Comedy|Drama\n12::C::Drama\n13::D::War\n").unwrap();
        let params = MovieLensParams {
            users: 2,
            movies: 3,
            k: 1,
            max_rating: 5.0,
        };
        let inst = movielens_instance(&ratings, &genres, &params, 0).unwrap();
        assert_eq!(inst.objective.ground_size(), 3);
        assert_eq!(inst.objective.terms().len(), 2);
        assert_eq!(inst.matroid.blocks(), &[vec![0, 2], vec![1]]);
        // user 1 gets max(5, 4, 2) / 5 from selecting everything
        let all = inst.objective.terms()[0].inner.evaluate_binary(&[true; 3]).unwrap();
        assert!((all - 1.0).abs() < 1e-12);
    }
}
