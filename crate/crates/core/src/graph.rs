//! Plain graph algorithms over vertex subsets.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use std::collections::VecDeque;

use crate::region::RegionSet;

/// Strongly connected components of the graph induced on `alive`, listed so
/// that every component comes before any component that can reach it
/// (sinks first). `succ(v, out)` pushes the successors of `v`; successors
/// outside `alive` are ignored.
pub fn sccs<F>(alive: &RegionSet, mut succ: F) -> Vec<Vec<usize>>
where
    F: FnMut(usize, &mut Vec<usize>),
{
    let n = alive.universe();
    let mut local = vec![u32::MAX; n];
    let nodes: Vec<usize> = alive.iter().collect();
    for (i, &v) in nodes.iter().enumerate() {
        local[v] = i as u32;
    }
    let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(nodes.len(), nodes.len() * 2);
    for _ in &nodes {
        graph.add_node(());
    }
    let mut buf = Vec::new();
    for (i, &v) in nodes.iter().enumerate() {
        buf.clear();
        succ(v, &mut buf);
        for &w in &buf {
            if w < n && local[w] != u32::MAX {
                graph.add_edge(NodeIndex::new(i), NodeIndex::new(local[w] as usize), ());
            }
        }
    }
    tarjan_scc(&graph)
        .into_iter()
        .map(|comp| {
            let mut c: Vec<usize> = comp.into_iter().map(|x| nodes[x.index()]).collect();
            c.sort_unstable();
            c
        })
        .collect()
}

/// Vertices of `alive` that can reach `target` inside `alive`, with their BFS
/// distance (target vertices have distance 0). `pred` lists predecessors.
pub fn backward_bfs(alive: &RegionSet, target: &RegionSet, pred: &[Vec<usize>]) -> Vec<Option<usize>> {
    let mut dist = vec![None; alive.universe()];
    let mut queue = VecDeque::new();
    for v in target.iter() {
        if alive.contains(v) {
            dist[v] = Some(0);
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for &u in &pred[v] {
            if alive.contains(u) && dist[u].is_none() {
                dist[u] = Some(d + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scc_order_is_sinks_first() {
        // 0 -> 1 <-> 2 -> 3
        let adj = [vec![1], vec![2], vec![1, 3], vec![3]];
        let alive = RegionSet::full(4);
        let comps = sccs(&alive, |v, out| out.extend(&adj[v]));
        assert_eq!(comps, vec![vec![3], vec![1, 2], vec![0]]);
        let partial = RegionSet::from_ids(4, [0, 1, 2]);
        let comps = sccs(&partial, |v, out| out.extend(&adj[v]));
        assert_eq!(comps, vec![vec![1, 2], vec![0]]);
    }

    #[test]
    fn bfs_distances() {
        let pred = vec![vec![], vec![0], vec![1], vec![2, 0]];
        let d = backward_bfs(&RegionSet::full(4), &RegionSet::from_ids(4, [3]), &pred);
        assert_eq!(d, vec![Some(1), Some(2), Some(1), Some(0)]);
        let d = backward_bfs(&RegionSet::from_ids(4, [1, 2, 3]), &RegionSet::from_ids(4, [3]), &pred);
        assert_eq!(d, vec![None, Some(2), Some(1), Some(0)]);
    }
}
