"""Pure-Python kernel lane.

Both kernel lanes expose the same flat-function API over packed bit
arrays; the container classes build the argument packs and validate
inputs.  Pack layouts (tuples):

k2:   (tw, tb, tn, lw, ln, uw, un, height, n_padded, t_off, u_off)
      tw/tb: words and rank blocks of the internal bitmap, tn its bit
      length; lw/ln the leaf bitmap; uw/un the uniform-flag bitmap (None
      for the plain variant); t_off[lv] is the first bit of level lv
      (levels 1..height-1 live in the internal bitmap, level `height` is
      the leaf bitmap); u_off[lv] counts internal zeros before level lv.
brwt: (fw, fb, lw_off, lb_off, lbits, widths, w_off, offs, o_off,
      nlevels, n, n_rows, h)
      fw/fb concatenate the per-level words / rank blocks, with level lv
      occupying words fw[lw_off[lv]:lw_off[lv+1]]; widths/offs hold the
      per-node column counts and start bits, indexed via w_off/o_off;
      h = log2(n_rows) is the conceptual depth, nlevels the stored one.
rice: (words, offs, n) with offs[x] the first payload bit of row x.

Op codes: 0 union, 1 intersection, 2 difference, 3 symmetric difference.
"""

from __future__ import annotations

import numpy as np

from ._bitpack import unpack_bits

OP_UNION, OP_INTER, OP_DIFF, OP_SYMDIFF = 0, 1, 2, 3


def _bit(words, pos):
    return (int(words[pos >> 6]) >> (pos & 63)) & 1


# ---------------------------------------------------------------- bitvec

def bv_rank1(words, blocks, i):
    w = i >> 6
    r = 0
    start = 0
    if len(blocks):
        b = min(w >> 3, len(blocks) - 1)
        r = int(blocks[b])
        start = b << 3
    for j in range(start, w):
        r += int(words[j]).bit_count()
    rem = i & 63
    if rem:
        r += (int(words[w]) & ((1 << rem) - 1)).bit_count()
    return r


def bv_select1(words, blocks, j):
    # caller guarantees a j-th one exists
    r = 0
    w = 0
    if len(blocks):
        lo, hi = 0, len(blocks) - 1
        while lo < hi:
            mid = (lo + hi + 1) >> 1
            if int(blocks[mid]) <= j:
                lo = mid
            else:
                hi = mid - 1
        r = int(blocks[lo])
        w = lo << 3
    while True:
        c = int(words[w]).bit_count()
        if r + c > j:
            break
        r += c
        w += 1
    word = int(words[w])
    need = j - r
    pos = 0
    while True:
        if word & 1:
            if need == 0:
                return (w << 6) + pos
            need -= 1
        word >>= 1
        pos += 1


# ---------------------------------------------------------------- k2

def k2_is_related(k, x, y):
    tw, tb, tn, lw, ln, uw, un, height, npad, t_off, u_off = k
    s = height - 1
    pos = (((x >> s) & 1) << 1) | ((y >> s) & 1)
    for _ in range(1, height):
        if not _bit(tw, pos):
            if uw is None:
                return False
            return _bit(uw, pos - bv_rank1(tw, tb, pos)) == 1
        base = bv_rank1(tw, tb, pos + 1) << 2
        s -= 1
        pos = base + ((((x >> s) & 1) << 1) | ((y >> s) & 1))
    return _bit(lw, pos - tn) == 1


def k2_successors(k, x):
    tw, tb, tn, lw, ln, uw, un, height, npad, t_off, u_off = k
    out = []
    half = npad >> 1
    xb = (x >> (height - 1)) & 1
    stack = [((xb << 1) | 1, 1, half), (xb << 1, 1, 0)]
    while stack:
        pos, level, col0 = stack.pop()
        if level == height:
            if _bit(lw, pos - tn):
                out.append(col0)
            continue
        if not _bit(tw, pos):
            if uw is not None and _bit(uw, pos - bv_rank1(tw, tb, pos)):
                side = npad >> level
                out.extend(range(col0, col0 + side))
            continue
        base = bv_rank1(tw, tb, pos + 1) << 2
        xb2 = (x >> (height - level - 1)) & 1
        h2 = npad >> (level + 1)
        stack.append((base + (xb2 << 1) + 1, level + 1, col0 + h2))
        stack.append((base + (xb2 << 1), level + 1, col0))
    return np.asarray(out, np.uint32)


def k2_predecessors(k, y):
    tw, tb, tn, lw, ln, uw, un, height, npad, t_off, u_off = k
    out = []
    half = npad >> 1
    yb = (y >> (height - 1)) & 1
    stack = [(2 | yb, 1, half), (yb, 1, 0)]
    while stack:
        pos, level, row0 = stack.pop()
        if level == height:
            if _bit(lw, pos - tn):
                out.append(row0)
            continue
        if not _bit(tw, pos):
            if uw is not None and _bit(uw, pos - bv_rank1(tw, tb, pos)):
                side = npad >> level
                out.extend(range(row0, row0 + side))
            continue
        base = bv_rank1(tw, tb, pos + 1) << 2
        yb2 = (y >> (height - level - 1)) & 1
        h2 = npad >> (level + 1)
        stack.append((base + 2 + yb2, level + 1, row0 + h2))
        stack.append((base + yb2, level + 1, row0))
    return np.asarray(out, np.uint32)


def k2_range(k, x1, y1, x2, y2):
    tw, tb, tn, lw, ln, uw, un, height, npad, t_off, u_off = k
    xs_out = []
    ys_out = []
    half = npad >> 1
    stack = [(d, 1, (d >> 1) * half, (d & 1) * half) for d in range(4)]
    while stack:
        pos, level, r0, c0 = stack.pop()
        side = npad >> level
        if r0 > x2 or r0 + side - 1 < x1 or c0 > y2 or c0 + side - 1 < y1:
            continue
        if level == height:
            if _bit(lw, pos - tn):
                xs_out.append(r0)
                ys_out.append(c0)
            continue
        if not _bit(tw, pos):
            if uw is not None and _bit(uw, pos - bv_rank1(tw, tb, pos)):
                for rr in range(max(r0, x1), min(r0 + side - 1, x2) + 1):
                    for cc in range(max(c0, y1), min(c0 + side - 1, y2) + 1):
                        xs_out.append(rr)
                        ys_out.append(cc)
            continue
        base = bv_rank1(tw, tb, pos + 1) << 2
        h2 = side >> 1
        for d in range(4):
            stack.append((base + d, level + 1, r0 + (d >> 1) * h2, c0 + (d & 1) * h2))
    if not xs_out:
        return np.zeros((0, 2), np.uint32)
    xa = np.asarray(xs_out, np.uint32)
    ya = np.asarray(ys_out, np.uint32)
    order = np.lexsort((ya, xa))
    return np.stack([xa[order], ya[order]], axis=1)


def k2_union_plain(ka, kb):
    # breadth-first merge: both inputs are read with one running cursor
    # per bitmap because level order equals storage order
    twa, _, tna, lwa, lna = ka[0], ka[1], ka[2], ka[3], ka[4]
    twb, _, tnb, lwb, lnb = kb[0], kb[1], kb[2], kb[3], kb[4]
    height = ka[7]
    t_out = []
    l_out = []
    groups = [(1, 1)]
    ca = cb = la = lb = 0
    for level in range(1, height + 1):
        cell = level == height
        nxt = []
        for ha, hb in groups:
            for _ in range(4):
                a = b = 0
                if ha:
                    if cell:
                        a = _bit(lwa, la)
                        la += 1
                    else:
                        a = _bit(twa, ca)
                        ca += 1
                if hb:
                    if cell:
                        b = _bit(lwb, lb)
                        lb += 1
                    else:
                        b = _bit(twb, cb)
                        cb += 1
                o = a | b
                if cell:
                    l_out.append(o)
                else:
                    t_out.append(o)
                    if o:
                        nxt.append((a, b))
        groups = nxt
    if ca != tna or cb != tnb or la != lna or lb != lnb:
        raise RuntimeError("k2 union cursor drift")
    return np.asarray(t_out, np.uint8), np.asarray(l_out, np.uint8)


class _K2Cursor:
    __slots__ = ("t", "l", "u")

    def __init__(self, k):
        self.t = [int(v) for v in k[9]]
        self.l = 0
        self.u = None if k[10] is None else [int(v) for v in k[10]]


def k2_setop(op, ka, kb):
    """Depth-first merge with per-level cursors; used by every pairwise op
    except the plain-variant union (which stays breadth-first)."""
    height = ka[7]
    has_u = ka[5] is not None
    Z, O, M = 0, 1, 2
    twa, lwa, uwa = ka[0], ka[3], ka[5]
    twb, lwb, uwb = kb[0], kb[3], kb[5]
    ca = _K2Cursor(ka)
    cb = _K2Cursor(kb)
    t_out = [[] for _ in range(height)]
    u_out = [[] for _ in range(height)]
    l_out = []

    def read_t(tw, cur, level):
        p = cur.t[level]
        cur.t[level] = p + 1
        return _bit(tw, p)

    def read_u(uw, cur, level):
        p = cur.u[level]
        cur.u[level] = p + 1
        return _bit(uw, p)

    def read_l(lw, cur):
        p = cur.l
        cur.l = p + 1
        return _bit(lw, p)

    def read_state(tw, uw, cur, level):
        if read_t(tw, cur, level):
            return M
        if has_u:
            return O if read_u(uw, cur, level) else Z
        return Z

    def leaf_op(a, b):
        if op == OP_UNION:
            return a | b
        if op == OP_INTER:
            return a & b
        if op == OP_DIFF:
            return a & (1 - b)
        return a ^ b

    def subtree(tw, lw, uw, cur, level, emit, flip):
        # walk one subtree whose four child bits sit at `level`; when
        # emitting, copy bits through (complementing flags/cells on flip)
        if level == height:
            for _ in range(4):
                v = read_l(lw, cur)
                if emit:
                    l_out.append(v ^ flip)
            return
        bits4 = []
        for _ in range(4):
            bflag = read_t(tw, cur, level)
            bits4.append(bflag)
            if emit:
                t_out[level].append(bflag)
            if not bflag and has_u:
                u = read_u(uw, cur, level)
                if emit:
                    u_out[level].append(u ^ flip)
        for bflag in bits4:
            if bflag:
                subtree(tw, lw, uw, cur, level + 1, emit, flip)

    def copy_a(level, flip=0):
        subtree(twa, lwa, uwa, ca, level, True, flip)

    def copy_b(level, flip=0):
        subtree(twb, lwb, uwb, cb, level, True, flip)

    def skip_a(level):
        subtree(twa, lwa, uwa, ca, level, False, 0)

    def skip_b(level):
        subtree(twb, lwb, uwb, cb, level, False, 0)

    def combine(sa, sb, level):
        if sa == M and sb == M:
            return group(level)
        if op == OP_UNION:
            if sa == O or sb == O:
                if sa == M:
                    skip_a(level)
                if sb == M:
                    skip_b(level)
                return O
            if sa == M:
                copy_a(level)
                return M
            if sb == M:
                copy_b(level)
                return M
            return Z
        if op == OP_INTER:
            if sa == Z or sb == Z:
                if sa == M:
                    skip_a(level)
                if sb == M:
                    skip_b(level)
                return Z
            if sa == M:
                copy_a(level)
                return M
            if sb == M:
                copy_b(level)
                return M
            return O
        if op == OP_DIFF:
            if sa == Z:
                if sb == M:
                    skip_b(level)
                return Z
            if sb == O:
                if sa == M:
                    skip_a(level)
                return Z
            if sa == M:
                copy_a(level)
                return M
            if sb == M:
                copy_b(level, flip=1)
                return M
            return O
        if sa == Z:
            if sb == M:
                copy_b(level)
                return M
            return sb
        if sb == Z:
            if sa == M:
                copy_a(level)
                return M
            return sa
        if sa == O and sb == O:
            return Z
        if sa == O:
            copy_b(level, flip=1)
            return M
        copy_a(level, flip=1)
        return M

    def group(level):
        if level == height:
            a4 = [read_l(lwa, ca) for _ in range(4)]
            b4 = [read_l(lwb, cb) for _ in range(4)]
            st = [leaf_op(a4[i], b4[i]) for i in range(4)]
        else:
            a4 = [read_state(twa, uwa, ca, level) for _ in range(4)]
            b4 = [read_state(twb, uwb, cb, level) for _ in range(4)]
            st = [combine(a4[i], b4[i], level + 1) for i in range(4)]
        if st[0] == Z and st[1] == Z and st[2] == Z and st[3] == Z:
            return Z
        if has_u and st[0] == O and st[1] == O and st[2] == O and st[3] == O:
            return O
        if level == height:
            l_out.extend(st)
        else:
            for s2 in st:
                if s2 == M:
                    t_out[level].append(1)
                else:
                    t_out[level].append(0)
                    if has_u:
                        u_out[level].append(1 if s2 == O else 0)
        return M

    top = group(1)

    for level in range(1, height):
        if ca.t[level] != int(ka[9][level + 1]) or cb.t[level] != int(kb[9][level + 1]):
            raise RuntimeError("k2 setop cursor drift")
    if ca.l != ka[4] or cb.l != kb[4]:
        raise RuntimeError("k2 setop leaf cursor drift")

    if top == M:
        t_bits = (np.concatenate([np.asarray(t_out[lv], np.uint8) for lv in range(1, height)])
                  if height > 1 else np.zeros(0, np.uint8))
        l_bits = np.asarray(l_out, np.uint8)
        if has_u:
            u_bits = np.concatenate([np.asarray(u_out[lv], np.uint8) for lv in range(1, height)])
        else:
            u_bits = None
    else:
        t_bits = np.zeros(4, np.uint8)
        l_bits = np.zeros(0, np.uint8)
        u_bits = np.full(4, 1 if top == O else 0, np.uint8) if has_u else None
    return t_bits, l_bits, u_bits


# ---------------------------------------------------------------- brwt

def _bw_bit(P, lv, pos):
    fw = P[0]
    base = int(P[2][lv])
    return (int(fw[base + (pos >> 6)]) >> (pos & 63)) & 1


def _bw_rank(P, lv, pos):
    fw = P[0]
    fb = P[1]
    wbase = int(P[2][lv])
    bbase = int(P[3][lv])
    nb = int(P[3][lv + 1]) - bbase
    w = pos >> 6
    r = 0
    start = 0
    if nb:
        b = min(w >> 3, nb - 1)
        r = int(fb[bbase + b])
        start = b << 3
    for j in range(start, w):
        r += int(fw[wbase + j]).bit_count()
    rem = pos & 63
    if rem:
        r += (int(fw[wbase + w]) & ((1 << rem) - 1)).bit_count()
    return r


def _bw_width(P, lv, t):
    return int(P[5][int(P[6][lv]) + t])


def _bw_off(P, lv, t):
    return int(P[7][int(P[8][lv]) + t])


def _bw_words(P, lv):
    return P[0][int(P[2][lv]):int(P[2][lv + 1])]


def brwt_is_related(P, x, y):
    nlev = P[9]
    h = P[12]
    j = y
    for lv in range(nlev):
        t = x >> (h - lv)
        off = _bw_off(P, lv, t)
        w = _bw_width(P, lv, t)
        s = off + ((x >> (h - lv - 1)) & 1) * w
        if not _bw_bit(P, lv, s + j):
            return False
        if lv == nlev - 1:
            return True
        j = _bw_rank(P, lv, s + j) - _bw_rank(P, lv, s)
    return False


def brwt_successors(P, x):
    nlev = P[9]
    h = P[12]
    ids = None
    for lv in range(nlev):
        t = x >> (h - lv)
        off = _bw_off(P, lv, t)
        w = _bw_width(P, lv, t)
        if w == 0:
            return np.zeros(0, np.uint32)
        s = off + ((x >> (h - lv - 1)) & 1) * w
        bits = unpack_bits(_bw_words(P, lv), s, s + w)
        if ids is None:
            ids = np.flatnonzero(bits).astype(np.uint32)
        else:
            ids = ids[bits.astype(bool)]
        if ids.size == 0:
            return np.zeros(0, np.uint32)
    return ids


def brwt_predecessors(P, y):
    nlev = P[9]
    out = []

    def rec(lv, t, j):
        off = _bw_off(P, lv, t)
        w = _bw_width(P, lv, t)
        bl = _bw_bit(P, lv, off + j)
        br = _bw_bit(P, lv, off + w + j)
        leaf = lv == nlev - 1
        if bl:
            if leaf:
                out.append(2 * t)
            else:
                rec(lv + 1, 2 * t, _bw_rank(P, lv, off + j) - _bw_rank(P, lv, off))
        if br:
            if leaf:
                out.append(2 * t + 1)
            else:
                rec(lv + 1, 2 * t + 1, _bw_rank(P, lv, off + w + j) - _bw_rank(P, lv, off + w))

    rec(0, 0, y)
    return np.asarray(out, np.uint32)


def brwt_range(P, x1, y1, x2, y2):
    nlev = P[9]
    h = P[12]
    xs_out = []
    ys_out = []

    def rec(lv, t, j0, ids):
        rows0 = t << (h - lv)
        if rows0 > x2 or rows0 + (1 << (h - lv)) - 1 < x1:
            return
        off = _bw_off(P, lv, t)
        w = _bw_width(P, lv, t)
        leaf = lv == nlev - 1
        words = _bw_words(P, lv)
        for side in (0, 1):
            s = off + side * w
            bits = unpack_bits(words, s + j0, s + j0 + ids.size)
            keep = bits.astype(bool)
            if not keep.any():
                continue
            sub = ids[keep]
            if leaf:
                row = 2 * t + side
                if x1 <= row <= x2:
                    xs_out.append(np.full(sub.size, row, np.uint32))
                    ys_out.append(sub)
            else:
                cj = _bw_rank(P, lv, s + j0) - _bw_rank(P, lv, s)
                rec(lv + 1, 2 * t + side, cj, sub)

    ids0 = np.arange(y1, y2 + 1, dtype=np.uint32)
    if ids0.size:
        rec(0, 0, y1, ids0)
    if not xs_out:
        return np.zeros((0, 2), np.uint32)
    return np.stack([np.concatenate(xs_out), np.concatenate(ys_out)], axis=1)


def _union_halves(X, lv, t, fx):
    w = fx.size
    if lv < X[9]:
        wx = _bw_width(X, lv, t)
        if wx:
            off = _bw_off(X, lv, t)
            words = _bw_words(X, lv)
            raw_l = unpack_bits(words, off, off + wx)
            raw_r = unpack_bits(words, off + wx, off + 2 * wx)
            mask = fx.astype(bool)
            if int(mask.sum()) != wx:
                raise RuntimeError("brwt union flag drift")
            bl = np.zeros(w, np.uint8)
            br = np.zeros(w, np.uint8)
            bl[mask] = raw_l
            br[mask] = raw_r
            return bl, br
    return np.zeros(w, np.uint8), np.zeros(w, np.uint8)


def brwt_union(A, B):
    """Breadth-first union: per node, project each input's halves onto the
    merged column set and OR them; survivors propagate to the children."""
    h = A[12]
    n = A[10]
    levels = []
    cur = [(0, np.ones(n, np.uint8), np.ones(n, np.uint8))] if n else []
    for lv in range(h):
        leaf = lv == h - 1
        parts = []
        widths = np.zeros(1 << lv, np.uint32)
        nxt = []
        for t, fa, fb in cur:
            widths[t] = fa.size
            abl, abr = _union_halves(A, lv, t, fa)
            bbl, bbr = _union_halves(B, lv, t, fb)
            obl = abl | bbl
            obr = abr | bbr
            parts.append(obl)
            parts.append(obr)
            if not leaf:
                kl = obl.astype(bool)
                if kl.any():
                    nxt.append((2 * t, abl[kl], bbl[kl]))
                kr = obr.astype(bool)
                if kr.any():
                    nxt.append((2 * t + 1, abr[kr], bbr[kr]))
        bits = np.concatenate(parts) if parts else np.zeros(0, np.uint8)
        levels.append((bits, widths))
        cur = nxt
    return levels


def _slot(lv, t):
    return 2 * ((1 << lv) - 1 + t)


def _leafval(op, a, b):
    if op == OP_INTER:
        return a & b
    if op == OP_DIFF:
        return a & (1 - b)
    return a ^ b


def _setop_arena(A, B):
    h = A[12]
    nslots = 2 * ((1 << h) - 1)
    caps = np.zeros(nslots, np.int64)
    for lv in range(h):
        cnt = 1 << lv
        tot = np.zeros(cnt, np.int64)
        if lv < A[9]:
            tot += A[5][int(A[6][lv]):int(A[6][lv]) + cnt].astype(np.int64)
        if lv < B[9]:
            tot += B[5][int(B[6][lv]):int(B[6][lv]) + cnt].astype(np.int64)
        base = 2 * (cnt - 1)
        idx = base + 2 * np.arange(cnt)
        caps[idx] = tot
        caps[idx + 1] = tot
    starts = np.zeros(nslots + 1, np.int64)
    np.cumsum(caps, out=starts[1:])
    arena = np.zeros(int(starts[-1]), np.uint8)
    return arena, starts, starts[:-1].copy()


def _assemble(h, arena, starts, fill):
    levels = []
    last = 0
    for lv in range(h):
        cnt = 1 << lv
        base = 2 * (cnt - 1)
        widths = np.zeros(cnt, np.uint32)
        parts = []
        total = 0
        for t in range(cnt):
            s = base + 2 * t
            wl = int(fill[s] - starts[s])
            wr = int(fill[s + 1] - starts[s + 1])
            if wl != wr:
                raise RuntimeError("brwt setop half-width drift")
            widths[t] = wl
            total += wl
            if wl:
                parts.append(arena[starts[s]:fill[s]])
                parts.append(arena[starts[s + 1]:fill[s + 1]])
        bits = np.concatenate(parts) if parts else np.zeros(0, np.uint8)
        levels.append((bits, widths))
        if total:
            last = lv
    return levels[:last + 1]


def brwt_setop_cursor(op, A, B, pA, pB):
    """Depth-first pairwise op, cursor navigation: one root-to-leaf pass
    per root column, with per-slot cursors replacing rank calls."""
    h = A[12]
    n = A[10]
    arena, starts, fill = _setop_arena(A, B)
    leaf_lv = h - 1

    def skip(X, pX, slot, lv):
        b1 = _bw_bit(X, lv, int(pX[slot]))
        b2 = _bw_bit(X, lv, int(pX[slot + 1]))
        if lv < leaf_lv:
            if b1:
                skip(X, pX, (slot + 1) * 2, lv + 1)
            if b2:
                skip(X, pX, (slot + 2) * 2, lv + 1)
        pX[slot] += 1
        pX[slot + 1] += 1

    def copy(X, pX, slot, lv):
        b1 = _bw_bit(X, lv, int(pX[slot]))
        b2 = _bw_bit(X, lv, int(pX[slot + 1]))
        if lv < leaf_lv:
            if b1:
                copy(X, pX, (slot + 1) * 2, lv + 1)
            if b2:
                copy(X, pX, (slot + 2) * 2, lv + 1)
        arena[fill[slot]] = b1
        fill[slot] += 1
        arena[fill[slot + 1]] = b2
        fill[slot + 1] += 1
        pX[slot] += 1
        pX[slot + 1] += 1

    def half(a, b, cslot, clv):
        if a and b:
            return rec(cslot, clv)
        if a:
            if op == OP_INTER:
                skip(A, pA, cslot, clv)
                return 0
            copy(A, pA, cslot, clv)
            return 1
        if b:
            if op == OP_SYMDIFF:
                copy(B, pB, cslot, clv)
                return 1
            skip(B, pB, cslot, clv)
            return 0
        return 0

    def rec(slot, lv):
        a1 = _bw_bit(A, lv, int(pA[slot]))
        a2 = _bw_bit(A, lv, int(pA[slot + 1]))
        b1 = _bw_bit(B, lv, int(pB[slot]))
        b2 = _bw_bit(B, lv, int(pB[slot + 1]))
        if lv == leaf_lv:
            kl = _leafval(op, a1, b1)
            kr = _leafval(op, a2, b2)
        else:
            kl = half(a1, b1, (slot + 1) * 2, lv + 1)
            kr = half(a2, b2, (slot + 2) * 2, lv + 1)
        if kl or kr or slot == 0:
            arena[fill[slot]] = kl
            fill[slot] += 1
            arena[fill[slot + 1]] = kr
            fill[slot + 1] += 1
        pA[slot] += 1
        pA[slot + 1] += 1
        pB[slot] += 1
        pB[slot + 1] += 1
        return 1 if (kl or kr) else 0

    for _ in range(n):
        rec(0, 0)
    return _assemble(h, arena, starts, fill)


def brwt_setop_rank(op, A, B):
    """Same pairwise op via rank navigation: child positions are recomputed
    with rank calls instead of cursor tables."""
    h = A[12]
    n = A[10]
    arena, starts, fill = _setop_arena(A, B)
    leaf_lv = h - 1

    def copy(X, lv, t, j):
        off = _bw_off(X, lv, t)
        w = _bw_width(X, lv, t)
        x1 = _bw_bit(X, lv, off + j)
        x2 = _bw_bit(X, lv, off + w + j)
        if lv < leaf_lv:
            if x1:
                copy(X, lv + 1, 2 * t, _bw_rank(X, lv, off + j) - _bw_rank(X, lv, off))
            if x2:
                copy(X, lv + 1, 2 * t + 1, _bw_rank(X, lv, off + w + j) - _bw_rank(X, lv, off + w))
        slot = _slot(lv, t)
        arena[fill[slot]] = x1
        fill[slot] += 1
        arena[fill[slot + 1]] = x2
        fill[slot + 1] += 1

    def rec(lv, t, ja, jb):
        offa = _bw_off(A, lv, t)
        wa = _bw_width(A, lv, t)
        offb = _bw_off(B, lv, t)
        wb = _bw_width(B, lv, t)
        a1 = _bw_bit(A, lv, offa + ja)
        a2 = _bw_bit(A, lv, offa + wa + ja)
        b1 = _bw_bit(B, lv, offb + jb)
        b2 = _bw_bit(B, lv, offb + wb + jb)
        if lv == leaf_lv:
            kl = _leafval(op, a1, b1)
            kr = _leafval(op, a2, b2)
        else:
            kl = kr = 0
            if a1 and b1:
                kl = rec(lv + 1, 2 * t,
                         _bw_rank(A, lv, offa + ja) - _bw_rank(A, lv, offa),
                         _bw_rank(B, lv, offb + jb) - _bw_rank(B, lv, offb))
            elif a1:
                if op != OP_INTER:
                    copy(A, lv + 1, 2 * t, _bw_rank(A, lv, offa + ja) - _bw_rank(A, lv, offa))
                    kl = 1
            elif b1:
                if op == OP_SYMDIFF:
                    copy(B, lv + 1, 2 * t, _bw_rank(B, lv, offb + jb) - _bw_rank(B, lv, offb))
                    kl = 1
            if a2 and b2:
                kr = rec(lv + 1, 2 * t + 1,
                         _bw_rank(A, lv, offa + wa + ja) - _bw_rank(A, lv, offa + wa),
                         _bw_rank(B, lv, offb + wb + jb) - _bw_rank(B, lv, offb + wb))
            elif a2:
                if op != OP_INTER:
                    copy(A, lv + 1, 2 * t + 1, _bw_rank(A, lv, offa + wa + ja) - _bw_rank(A, lv, offa + wa))
                    kr = 1
            elif b2:
                if op == OP_SYMDIFF:
                    copy(B, lv + 1, 2 * t + 1, _bw_rank(B, lv, offb + wb + jb) - _bw_rank(B, lv, offb + wb))
                    kr = 1
        slot = _slot(lv, t)
        if kl or kr or slot == 0:
            arena[fill[slot]] = kl
            fill[slot] += 1
            arena[fill[slot + 1]] = kr
            fill[slot + 1] += 1
        return 1 if (kl or kr) else 0

    for col in range(n):
        rec(0, 0, col, col)
    return _assemble(h, arena, starts, fill)


# ---------------------------------------------------------------- rice

class _BitWriter:
    __slots__ = ("buf", "nbits")

    def __init__(self):
        self.buf = bytearray()
        self.nbits = 0

    def write(self, value, width):
        for i in range(width):
            if not self.nbits & 7:
                self.buf.append(0)
            if (value >> i) & 1:
                self.buf[-1] |= 1 << (self.nbits & 7)
            self.nbits += 1

    def rice(self, v, k):
        q = v >> k
        self.write((1 << q) - 1, q)
        self.write(0, 1)
        self.write(v & ((1 << k) - 1), k)


class _BitReader:
    __slots__ = ("words", "pos", "end")

    def __init__(self, words, pos, end):
        self.words = words
        self.pos = pos
        self.end = end

    def read(self, width):
        if self.pos + width > self.end:
            raise ValueError("corrupt row payload: truncated code")
        v = 0
        for i in range(width):
            v |= _bit(self.words, self.pos) << i
            self.pos += 1
        return v

    def rice(self, k):
        q = 0
        while True:
            if self.pos >= self.end:
                raise ValueError("corrupt row payload: unterminated unary part")
            b = _bit(self.words, self.pos)
            self.pos += 1
            if not b:
                break
            q += 1
        return (q << k) | self.read(k)


def _write_varint(wr, v):
    while True:
        chunk = v & 0x7F
        v >>= 7
        wr.write(1 if v else 0, 1)
        wr.write(chunk, 7)
        if not v:
            break


def _read_varint(rd):
    result = 0
    shift = 0
    while True:
        cont = rd.read(1)
        result |= rd.read(7) << shift
        shift += 7
        if not cont:
            return result
        if shift > 63:
            raise ValueError("corrupt row payload: runaway varint")


def _row_symbols(row):
    """Gap transform: absolute first id, then per gap g either g-1, or for
    a maximal run of r consecutive gap-1 steps the marker 0 followed by r."""
    vals = [int(row[0])]
    g = np.diff(row.astype(np.int64))
    i = 0
    top = len(g)
    while i < top:
        if g[i] == 1:
            j = i
            while j < top and g[j] == 1:
                j += 1
            vals.append(0)
            vals.append(j - i)
            i = j
        else:
            vals.append(int(g[i]) - 1)
            i += 1
    return vals


def rice_encode(cols, indptr, n):
    wr = _BitWriter()
    offsets = np.zeros(n + 1, np.uint64)
    for x in range(n):
        lo = int(indptr[x])
        hi = int(indptr[x + 1])
        if hi > lo:
            vals = np.asarray(_row_symbols(cols[lo:hi]), np.int64)
            best_k = 0
            best_cost = -1
            for k in range(17):
                cost = int((vals >> k).sum()) + (k + 1) * vals.size
                if best_cost < 0 or cost < best_cost:
                    best_cost = cost
                    best_k = k
            wr.write(best_k, 5)
            _write_varint(wr, hi - lo)
            for v in vals:
                wr.rice(int(v), best_k)
        offsets[x + 1] = wr.nbits
    buf = bytes(wr.buf) + b"\x00" * ((-len(wr.buf)) % 8)
    words = np.frombuffer(buf, np.uint64).copy() if buf else np.zeros(0, np.uint64)
    return offsets, words


def rice_decode_row(words, lo, hi, cap):
    if hi <= lo:
        return np.zeros(0, np.uint32)
    rd = _BitReader(words, lo, hi)
    k = rd.read(5)
    d = _read_varint(rd)
    if d < 1 or d > cap:
        raise ValueError("corrupt row payload: bad degree")
    out = np.empty(d, np.uint32)
    prev = rd.rice(k)
    out[0] = prev
    cnt = 1
    while cnt < d:
        v = rd.rice(k)
        if v == 0:
            r = rd.rice(k)
            if r < 1 or cnt + r > d:
                raise ValueError("corrupt row payload: bad run length")
            out[cnt:cnt + r] = np.arange(prev + 1, prev + r + 1, dtype=np.uint32)
            cnt += r
            prev += r
        else:
            prev += v + 1
            out[cnt] = prev
            cnt += 1
    if rd.pos != hi:
        raise ValueError("corrupt row payload: trailing bits")
    return out


def rice_successors(R, x):
    words, offs, n = R
    return rice_decode_row(words, int(offs[x]), int(offs[x + 1]), n)


def rice_is_related(R, x, y):
    row = rice_successors(R, x)
    i = int(np.searchsorted(row, y))
    return bool(i < row.size and int(row[i]) == y)


def rice_predecessors(R, y):
    # deliberately a full scan: every row is decoded and probed
    words, offs, n = R
    out = []
    for x in range(n):
        row = rice_decode_row(words, int(offs[x]), int(offs[x + 1]), n)
        if row.size:
            i = int(np.searchsorted(row, y))
            if i < row.size and int(row[i]) == y:
                out.append(x)
    return np.asarray(out, np.uint32)


def rice_range(R, x1, y1, x2, y2):
    words, offs, n = R
    xs_out = []
    ys_out = []
    for x in range(x1, x2 + 1):
        row = rice_decode_row(words, int(offs[x]), int(offs[x + 1]), n)
        if row.size:
            lo = int(np.searchsorted(row, y1))
            hi = int(np.searchsorted(row, y2, side="right"))
            if hi > lo:
                xs_out.append(np.full(hi - lo, x, np.uint32))
                ys_out.append(row[lo:hi])
    if not xs_out:
        return np.zeros((0, 2), np.uint32)
    return np.stack([np.concatenate(xs_out), np.concatenate(ys_out)], axis=1)


def rice_setop(op, Ra, Rb):
    wordsa, offsa, n = Ra
    wordsb, offsb, _ = Rb
    if op == OP_UNION:
        fn = np.union1d
    elif op == OP_INTER:
        fn = np.intersect1d
    elif op == OP_DIFF:
        fn = np.setdiff1d
    else:
        fn = np.setxor1d
    rows = []
    sizes = np.zeros(n, np.int64)
    for x in range(n):
        ra = rice_decode_row(wordsa, int(offsa[x]), int(offsa[x + 1]), n)
        rb = rice_decode_row(wordsb, int(offsb[x]), int(offsb[x + 1]), n)
        r = fn(ra, rb).astype(np.uint32)
        sizes[x] = r.size
        if r.size:
            rows.append(r)
    cols = np.concatenate(rows) if rows else np.zeros(0, np.uint32)
    indptr = np.zeros(n + 1, np.int64)
    np.cumsum(sizes, out=indptr[1:])
    return rice_encode(cols, indptr, n)
