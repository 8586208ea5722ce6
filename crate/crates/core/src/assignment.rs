//! Exact integer min-cost assignment solvers.

/// Minimum-cost perfect assignment of `n` rows to `m >= n` columns
/// (Hungarian method with potentials, O(n²m)). Returns `(row -> column, cost)`.
pub fn hungarian(cost: &[Vec<i64>]) -> (Vec<usize>, i64) {
    let n = cost.len();
    if n == 0 {
        return (Vec::new(), 0);
    }
    let m = cost[0].len();
    assert!(m >= n, "need at least as many columns as rows");
    assert!(cost.iter().all(|r| r.len() == m), "ragged cost matrix");
    const INF: i64 = i64::MAX / 4;
    // 1-based arrays; column 0 is a virtual start.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![INF; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=m {
        if p[j] != 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    let total = assign.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    (assign, total)
}

/// Minimum-cost assignment of unit-supply rows to column groups with capacities
/// (`Σ capacity = rows`). Successive shortest paths over the group graph, so the
/// work is polynomial in the number of groups rather than the number of columns.
/// Returns `(row -> group, cost)`.
pub fn transport(cost: &[Vec<i64>], capacity: &[usize]) -> (Vec<usize>, i64) {
    let n = cost.len();
    let k = capacity.len();
    assert_eq!(capacity.iter().sum::<usize>(), n, "capacities must sum to the row count");
    assert!(cost.iter().all(|r| r.len() == k), "ragged cost matrix");
    const INF: i64 = i64::MAX / 4;
    let mut assign = vec![usize::MAX; n];
    let mut load = vec![0usize; k];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for i in 0..n {
        // move[g][h]: cheapest row currently in g to move to h, and its cost change.
        let mut mv = vec![vec![(INF, usize::MAX); k]; k];
        for g in 0..k {
            for &j in &members[g] {
                for h in 0..k {
                    if h != g {
                        let c = cost[j][h] - cost[j][g];
                        if c < mv[g][h].0 {
                            mv[g][h] = (c, j);
                        }
                    }
                }
            }
        }
        let mut dist: Vec<i64> = cost[i].clone();
        let mut prev = vec![usize::MAX; k];
        // Bellman-Ford; the current assignment is optimal, so there are no negative cycles.
        for _ in 0..k {
            let mut changed = false;
            for g in 0..k {
                if dist[g] >= INF {
                    continue;
                }
                for h in 0..k {
                    if mv[g][h].0 < INF && dist[g] + mv[g][h].0 < dist[h] {
                        dist[h] = dist[g] + mv[g][h].0;
                        prev[h] = g;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let end = (0..k)
            .filter(|&g| load[g] < capacity[g])
            .min_by_key(|&g| (dist[g], g))
            .expect("a group with spare capacity");
        // Walk back, shifting one row along each hop.
        let mut h = end;
        while prev[h] != usize::MAX {
            let g = prev[h];
            let j = mv[g][h].1;
            members[g].retain(|&x| x != j);
            members[h].push(j);
            assign[j] = h;
            h = g;
        }
        members[h].push(i);
        assign[i] = h;
        load[end] += 1;
    }
    let total = assign.iter().enumerate().map(|(i, &g)| cost[i][g]).sum();
    (assign, total)
}
