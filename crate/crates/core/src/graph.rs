//! Small graph algorithms shared by the Cayley and Bass–Serre code.

/// Strongly connected components (iterative Tarjan). Components are
/// numbered by their smallest vertex, so the numbering depends only on
/// the graph. Returns `(component of each vertex, members of each component)`.
pub fn strongly_connected(n: usize, succ: &[Vec<usize>]) -> (Vec<usize>, Vec<Vec<usize>>) {
    const NONE: usize = usize::MAX;
    let mut index = vec![NONE; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut raw_comp = vec![NONE; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0;
    for start in 0..n {
        if index[start] != NONE {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(start, 0)];
        index[start] = counter;
        low[start] = counter;
        counter += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if *next < succ[v].len() {
                let w = succ[v][*next];
                *next += 1;
                if index[w] == NONE {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut members = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    raw_comp[w] = comps.len();
                    members.push(w);
                    if w == v {
                        break;
                    }
                }
                members.sort_unstable();
                comps.push(members);
            }
        }
    }
    let mut order: Vec<usize> = (0..comps.len()).collect();
    order.sort_by_key(|&c| comps[c][0]);
    let mut renumber = vec![0; comps.len()];
    for (new, &old) in order.iter().enumerate() {
        renumber[old] = new;
    }
    let comp_of = raw_comp.iter().map(|&c| renumber[c]).collect();
    let sorted = order.into_iter().map(|c| std::mem::take(&mut comps[c])).collect();
    (comp_of, sorted)
}

/// Union-find with path halving; the smaller root wins so that class
/// representatives are deterministic.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when two classes were merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// First edge (by index) that closes an undirected cycle, if any.
pub fn first_cycle_edge(n: usize, edges: &[(usize, usize)]) -> Option<usize> {
    let mut uf = UnionFind::new(n);
    edges.iter().position(|&(a, b)| !uf.union(a, b))
}

/// Number of undirected connected components.
pub fn component_count(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut uf = UnionFind::new(n);
    let mut count = n;
    for &(a, b) in edges {
        if uf.union(a, b) {
            count -= 1;
        }
    }
    count
}

/// Component id of every vertex, numbered by smallest member.
pub fn components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut uf = UnionFind::new(n);
    for &(a, b) in edges {
        uf.union(a, b);
    }
    let mut id = vec![usize::MAX; n];
    let mut next = 0;
    (0..n)
        .map(|v| {
            let r = uf.find(v);
            if id[r] == usize::MAX {
                id[r] = next;
                next += 1;
            }
            id[r]
        })
        .collect()
}

/// Canonical string of a rooted unordered tree (AHU encoding); two rooted
/// trees are isomorphic exactly when their encodings agree.
pub fn rooted_tree_code(parent: &[Option<usize>]) -> Option<String> {
    let n = parent.len();
    let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
    if roots.len() != 1 {
        return None;
    }
    let mut children = vec![Vec::new(); n];
    for (v, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            children[p].push(v);
        }
    }
    // post-order without recursion
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![roots[0]];
    while let Some(v) = stack.pop() {
        order.push(v);
        stack.extend(children[v].iter().copied());
    }
    if order.len() != n {
        return None;
    }
    let mut code = vec![String::new(); n];
    for &v in order.iter().rev() {
        let mut parts: Vec<String> = children[v].iter().map(|&c| code[c].clone()).collect();
        parts.sort();
        code[v] = format!("({})", parts.concat());
    }
    Some(std::mem::take(&mut code[roots[0]]))
}
