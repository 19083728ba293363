//! Line-based unified diff with three lines of context, Myers O(ND).

/// One unified-format hunk. Starts are 1-based line numbers; a length of
/// zero renders as the conventional `start-1,0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hunk {
    pub old_start: usize,
    pub old_len: usize,
    pub new_start: usize,
    pub new_len: usize,
    pub lines: Vec<DiffLine>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiffLine {
    Context(String),
    Removed(String),
    Added(String),
}

const NO_NEWLINE_MARKER: &str = "\\ No newline at end of file";

fn split_lines(text: &str) -> Vec<&str> {
    if text.is_empty() {
        return Vec::new();
    }
    let mut lines: Vec<&str> = text.split('\n').collect();
    if text.ends_with('\n') {
        lines.pop();
    } else {
        // A missing final newline must be visible as a difference.
        lines.push(NO_NEWLINE_MARKER);
    }
    lines
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Equal,
    Remove,
    Add,
}

/// Myers shortest-edit-script over the trimmed middle of the inputs.
fn edit_script(a: &[&str], b: &[&str]) -> Vec<Op> {
    // Common prefix and suffix fall out immediately.
    let mut prefix = 0;
    while prefix < a.len() && prefix < b.len() && a[prefix] == b[prefix] {
        prefix += 1;
    }
    let mut suffix = 0;
    while suffix < a.len() - prefix && suffix < b.len() - prefix && a[a.len() - 1 - suffix] == b[b.len() - 1 - suffix] {
        suffix += 1;
    }
    let ca = &a[prefix..a.len() - suffix];
    let cb = &b[prefix..b.len() - suffix];

    let mut script = vec![Op::Equal; prefix];
    script.extend(myers(ca, cb));
    script.extend(std::iter::repeat_n(Op::Equal, suffix));
    script
}

fn myers(a: &[&str], b: &[&str]) -> Vec<Op> {
    let (n, m) = (a.len() as isize, b.len() as isize);
    if n == 0 {
        return vec![Op::Add; m as usize];
    }
    if m == 0 {
        return vec![Op::Remove; n as usize];
    }
    let max = n + m;
    let offset = max;
    let width = (2 * max + 1) as usize;
    let mut v = vec![0isize; width];
    // trace[d] is the frontier state before step d.
    let mut trace: Vec<Vec<isize>> = Vec::new();

    'outer: for d in 0..=max {
        trace.push(v.clone());
        let mut k = -d;
        while k <= d {
            let idx = (k + offset) as usize;
            let mut x = if k == -d || (k != d && v[idx - 1] < v[idx + 1]) { v[idx + 1] } else { v[idx - 1] + 1 };
            let mut y = x - k;
            while x < n && y < m && a[x as usize] == b[y as usize] {
                x += 1;
                y += 1;
            }
            v[idx] = x;
            if x >= n && y >= m {
                break 'outer;
            }
            k += 2;
        }
    }

    let mut ops_rev = Vec::new();
    let (mut x, mut y) = (n, m);
    for d in (0..trace.len()).rev() {
        let vd = &trace[d];
        let d_i = d as isize;
        let k = x - y;
        let idx = (k + offset) as usize;
        let prev_k = if k == -d_i || (k != d_i && vd[idx - 1] < vd[idx + 1]) { k + 1 } else { k - 1 };
        let prev_x = vd[(prev_k + offset) as usize];
        let prev_y = prev_x - prev_k;
        while x > prev_x && y > prev_y {
            ops_rev.push(Op::Equal);
            x -= 1;
            y -= 1;
        }
        if d > 0 {
            if x == prev_x {
                ops_rev.push(Op::Add);
            } else {
                ops_rev.push(Op::Remove);
            }
        }
        x = prev_x;
        y = prev_y;
    }
    ops_rev.reverse();
    ops_rev
}

/// Diff two texts into unified hunks with three lines of context. Empty
/// exactly when the inputs are equal.
pub fn unified_text_diff(a: &str, b: &str) -> Vec<Hunk> {
    let a_lines = split_lines(a);
    let b_lines = split_lines(b);
    if a_lines == b_lines {
        return Vec::new();
    }
    let script = edit_script(&a_lines, &b_lines);

    const CONTEXT: usize = 3;
    let mut hunks = Vec::new();
    let mut current: Option<Hunk> = None;
    let mut pending_context: Vec<(usize, usize)> = Vec::new(); // (a_idx, b_idx)
    let mut trailing = 0usize;
    let (mut ai, mut bi) = (0usize, 0usize);

    for op in script {
        match op {
            Op::Equal => {
                if let Some(hunk) = current.as_mut() {
                    if trailing < CONTEXT {
                        hunk.lines.push(DiffLine::Context(a_lines[ai].to_string()));
                        hunk.old_len += 1;
                        hunk.new_len += 1;
                        trailing += 1;
                    } else {
                        hunks.push(current.take().unwrap());
                        pending_context.clear();
                        pending_context.push((ai, bi));
                    }
                } else {
                    pending_context.push((ai, bi));
                    if pending_context.len() > CONTEXT {
                        pending_context.remove(0);
                    }
                }
                ai += 1;
                bi += 1;
            }
            Op::Remove | Op::Add => {
                if current.is_none() {
                    let lead = pending_context.len();
                    let (start_a, start_b) = pending_context.first().copied().unwrap_or((ai, bi));
                    let mut hunk = Hunk {
                        old_start: start_a + 1,
                        old_len: 0,
                        new_start: start_b + 1,
                        new_len: 0,
                        lines: Vec::with_capacity(lead + 1),
                    };
                    for (ca, _) in pending_context.drain(..) {
                        hunk.lines.push(DiffLine::Context(a_lines[ca].to_string()));
                        hunk.old_len += 1;
                        hunk.new_len += 1;
                    }
                    current = Some(hunk);
                } else if trailing > 0 {
                    // Context already added stays; reset the trailing counter.
                }
                trailing = 0;
                let hunk = current.as_mut().unwrap();
                if op == Op::Remove {
                    hunk.lines.push(DiffLine::Removed(a_lines[ai].to_string()));
                    hunk.old_len += 1;
                    ai += 1;
                } else {
                    hunk.lines.push(DiffLine::Added(b_lines[bi].to_string()));
                    hunk.new_len += 1;
                    bi += 1;
                }
            }
        }
    }
    if let Some(hunk) = current.take() {
        hunks.push(hunk);
    }
    hunks
}

/// Render hunks in standard unified format (no file header lines).
pub fn render_hunks(hunks: &[Hunk]) -> String {
    let mut out = String::new();
    for h in hunks {
        let fmt_range = |start: usize, len: usize| {
            if len == 0 {
                format!("{},0", start.saturating_sub(1))
            } else if len == 1 {
                format!("{start}")
            } else {
                format!("{start},{len}")
            }
        };
        out.push_str(&format!(
            "@@ -{} +{} @@\n",
            fmt_range(h.old_start, h.old_len),
            fmt_range(h.new_start, h.new_len)
        ));
        for line in &h.lines {
            match line {
                DiffLine::Context(l) => {
                    out.push(' ');
                    out.push_str(l);
                }
                DiffLine::Removed(l) => {
                    out.push('-');
                    out.push_str(l);
                }
                DiffLine::Added(l) => {
                    out.push('+');
                    out.push_str(l);
                }
            }
            out.push('\n');
        }
    }
    out
}
