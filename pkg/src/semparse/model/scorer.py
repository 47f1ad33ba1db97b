"""Neural scorer for transition sequences.

A bidirectional LSTM encodes the utterance.  An LSTM decoder runs one step
per action; its input at step t is the previous action's embedding, the
previous attentional vector and the parent feed (embedding of the frontier
field plus the decoder state at the step that created the field's owner).
Luong-style attention over the encoder states gives the attentional vector
``att = tanh(W_c [ctx; h])`` that feeds every output head:

* constructors and Reduce: softmax over the legal production embeddings of
  ``a_c . (W_app att)``;
* tokens: a gate mixes generation from the closed vocabulary with copying
  from the utterance through a pointer network;
* table columns: pointer over column-name encodings (a second BiLSTM).

Gradients are computed by hand; ``loss_and_grad`` is checked against finite
differences in the test-suite.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..asdl import Grammar
from ..errors import IllegalAction, IllegalOracle, MissingTable, ShapeMismatch
from ..table import TableContext
from ..transition import (
    END_TOKEN,
    REDUCE,
    ROOT_FIELD,
    ROOT_OWNER,
    ActionSpace,
    ApplyConstr,
    FrontierRef,
    GenToken,
    Reduce,
    SelColumn,
    apply_action,
    extract_actions,
    init_hypothesis,
    valid_actions,
)
from .layers import bilstm, bilstm_backward, lstm_cell, lstm_cell_backward, log_softmax, softmax, softmax_backward
from .vocab import UNK, Vocab


@dataclass
class ScorerConfig:
    embed_dim: int = 128
    hidden_dim: int = 256
    field_embed_dim: int = 64
    action_embed_dim: int = 64
    dropout_rate: float = 0.3
    vocab_cutoff: int = 2
    scalar_precision: str = "single"
    parent_feeding: bool = True
    init_scale: float = 0.1

    def __post_init__(self):
        for name in ("embed_dim", "hidden_dim", "field_embed_dim", "action_embed_dim"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")
        if self.scalar_precision not in ("single", "double"):
            raise ValueError("scalar_precision is 'single' or 'double'")

    @property
    def dtype(self):
        return np.float64 if self.scalar_precision == "double" else np.float32

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class EncoderStates:
    tokens: tuple
    states: np.ndarray
    summary: np.ndarray
    columns: Optional[np.ndarray] = None
    copy_index: dict = field(default_factory=dict)
    cache: object = None


@dataclass
class DecoderStep:
    h: np.ndarray
    c: np.ndarray
    att: np.ndarray
    ctx: np.ndarray
    alpha: np.ndarray
    parent_feed: np.ndarray
    cache: object = None


@dataclass(frozen=True, eq=False)
class Head:
    """Output support for one frontier: which logits exist and what they mean."""

    kind: str
    ids: np.ndarray
    reduce: bool = False
    columns: int = 0
    actions: tuple = ()


@dataclass
class StepPlan:
    prev: Optional[tuple]
    field_id: int
    parent_step: int
    head: Head
    target: tuple


@dataclass
class ExamplePlan:
    tokens: tuple
    src_ids: np.ndarray
    table: Optional[TableContext]
    steps: list


def _param_shapes(cfg: ScorerConfig, n_src, n_tok, n_prod, n_field):
    E, H, F, A = cfg.embed_dim, cfg.hidden_dim, cfg.field_embed_dim, cfg.action_embed_dim
    dec_in = A + H + F + (H if cfg.parent_feeding else 0)
    shapes = {
        "src_embed": (n_src, E),
        "prod_embed": (n_prod, A),
        "tok_embed": (n_tok, A),
        "sel_embed": (1, A),
        "field_embed": (n_field, F),
        "init_W": (H, 2 * H),
        "init_b": (H,),
        "dec_Wx": (4 * H, dec_in),
        "dec_Wh": (4 * H, H),
        "dec_b": (4 * H,),
        "att_W": (2 * H, H),
        "comb_W": (H, 3 * H),
        "app_W": (A, H),
        "gen_W": (A, H),
        "gate_W": (2, H),
        "gate_b": (2,),
        "copy_W": (2 * H, H),
        "col_W": (2 * H, H),
    }
    for enc in ("enc", "col"):
        for d in ("f", "b"):
            shapes[f"{enc}_{d}_Wx"] = (4 * H, E)
            shapes[f"{enc}_{d}_Wh"] = (4 * H, H)
            shapes[f"{enc}_{d}_b"] = (4 * H,)
    return shapes


def field_keys(grammar: Grammar) -> list[tuple[str, str]]:
    keys = [(ROOT_OWNER, ROOT_FIELD)]
    for c in grammar.constructors:
        keys.extend((c.name, f.name) for f in c.fields)
    return keys


class Scorer:
    """Parameters, vocabularies and the forward/backward computations."""

    def __init__(self, grammar: Grammar, config: ScorerConfig, src_vocab: Vocab,
                 tok_vocab: Vocab, params: Optional[dict] = None, seed: int = 0):
        self.grammar = grammar
        self.config = config
        self.src_vocab = src_vocab
        self.tok_vocab = tok_vocab
        self.dtype = config.dtype
        self.prod_ids = {c.name: i for i, c in enumerate(grammar.constructors)}
        self.reduce_id = len(grammar.constructors)
        self.field_ids = {k: i for i, k in enumerate(field_keys(grammar))}
        self.end_id = tok_vocab.stoi[END_TOKEN]
        self.shapes = _param_shapes(config, len(src_vocab), len(tok_vocab),
                                    self.reduce_id + 1, len(self.field_ids))
        if params is None:
            params = self.init_params(seed)
        self.set_params(params)
        self._heads: dict = {}

    # --- construction ------------------------------------------------------

    @classmethod
    def build(cls, grammar: Grammar, config: ScorerConfig, examples: Sequence, seed: int = 0) -> "Scorer":
        """Create vocabularies from training examples and initialize parameters.

        Examples need ``utterance``, ``tree`` and ``table`` attributes.
        """
        src_counts: Counter = Counter()
        tok_counts: Counter = Counter()
        for ex in examples:
            src_counts.update(ex.utterance)
            if ex.table is not None:
                for k in range(ex.table.width):
                    src_counts.update(ex.table.column_tokens(k))
            for a in extract_actions(grammar, ex.tree, ex.table):
                if isinstance(a, GenToken) and a.token != END_TOKEN:
                    tok_counts[a.token] += 1
        src_vocab = Vocab.build(src_counts, config.vocab_cutoff)
        tok_vocab = Vocab.build(tok_counts, config.vocab_cutoff, specials=(UNK, END_TOKEN))
        return cls(grammar, config, src_vocab, tok_vocab, seed=seed)

    def init_params(self, seed: int) -> dict:
        rng = np.random.default_rng(seed)
        s = self.config.init_scale
        H = self.config.hidden_dim
        params = {}
        for name, shape in sorted(self.shapes.items()):
            if name.endswith("_b") and len(shape) == 1:
                p = np.zeros(shape)
                if shape[0] == 4 * H:
                    p[H:2 * H] = 1.0  # forget gate
            else:
                p = rng.uniform(-s, s, size=shape)
            params[name] = p.astype(self.dtype)
        return params

    def set_params(self, params: dict):
        for name, shape in self.shapes.items():
            if name not in params:
                raise ShapeMismatch(f"missing parameter {name}")
            if tuple(params[name].shape) != shape:
                raise ShapeMismatch(f"{name}: expected {shape}, got {params[name].shape}")
        self.params = {k: np.asarray(params[k], dtype=self.dtype) for k in self.shapes}

    def zeros_like_params(self) -> dict:
        return {k: np.zeros_like(v) for k, v in self.params.items()}

    # --- encoder -------------------------------------------------------------

    def encode(self, utterance: Sequence[str], table: Optional[TableContext] = None) -> EncoderStates:
        if len(utterance) == 0:
            raise ValueError("cannot encode an empty utterance")
        return self._encode(tuple(utterance), np.array(self.src_vocab.ids(utterance)), table)

    def _encode(self, tokens, src_ids, table):
        P = self.params
        X = P["src_embed"][src_ids]
        states, summary, cache = bilstm(P, "enc", X)
        columns, col_caches = None, None
        if table is not None:
            rows, col_caches = [], []
            for k in range(table.width):
                cids = np.array(self.src_vocab.ids(table.column_tokens(k)))
                _, csum, ccache = bilstm(P, "col", P["src_embed"][cids])
                rows.append(csum)
                col_caches.append((cids, ccache))
            columns = np.stack(rows)
        index: dict = {}
        for i, t in enumerate(tokens):
            index.setdefault(t, []).append(i)
        copy_index = {t: np.array(v) for t, v in index.items()}
        return EncoderStates(tokens, states, summary, columns, copy_index, (src_ids, cache, col_caches))

    def _encode_backward(self, enc, dstates, dsummary, dcolumns, grads):
        src_ids, cache, col_caches = enc.cache
        dX = bilstm_backward(self.params, "enc", cache, dstates, dsummary, grads)
        np.add.at(grads["src_embed"], src_ids, dX)
        if col_caches is not None:
            H = self.config.hidden_dim
            for k, (cids, ccache) in enumerate(col_caches):
                n = len(cids)
                dX = bilstm_backward(self.params, "col", ccache, np.zeros((n, 2 * H), dtype=self.dtype),
                                     dcolumns[k], grads)
                np.add.at(grads["src_embed"], cids, dX)

    # --- decoder -------------------------------------------------------------

    def initial_state(self, enc: EncoderStates):
        H = self.config.hidden_dim
        pre = self.params["init_W"] @ enc.summary + self.params["init_b"]
        zero = np.zeros(H, dtype=self.dtype)
        return np.tanh(pre), pre, zero

    def action_key(self, action) -> Optional[tuple]:
        """Which embedding row represents ``action`` as decoder input."""
        if action is None:
            return None
        if isinstance(action, ApplyConstr):
            return ("prod_embed", self.prod_ids[action.constructor.name])
        if isinstance(action, Reduce):
            return ("prod_embed", self.reduce_id)
        if isinstance(action, GenToken):
            return ("tok_embed", self.tok_vocab[action.token])
        if isinstance(action, SelColumn):
            return ("sel_embed", 0)
        raise TypeError(f"not an action: {action!r}")

    def _action_vec(self, key):
        if key is None:
            return np.zeros(self.config.action_embed_dim, dtype=self.dtype)
        return self.params[key[0]][key[1]]

    def field_id(self, frontier: FrontierRef) -> int:
        return self.field_ids[frontier.key]

    def decode_step(self, prev: Optional[DecoderStep], prev_action, frontier: FrontierRef,
                    parent_state: Optional[np.ndarray], enc: EncoderStates) -> DecoderStep:
        """One decoder transition; ``prev=None`` starts from the encoder summary."""
        H = self.config.hidden_dim
        if parent_state is None:
            parent_state = np.zeros(H, dtype=self.dtype)
        if np.shape(parent_state) != (H,):
            raise ShapeMismatch(f"parent state must have shape ({H},), got {np.shape(parent_state)}")
        if prev is None:
            h, c, att = self.initial_state(enc)
        else:
            h, c, att = prev.h, prev.c, prev.att
        return self._step(h, c, att, self._action_vec(self.action_key(prev_action)),
                          self.field_id(frontier), parent_state, enc)

    def _step(self, h_prev, c_prev, att_prev, a_vec, field_id, parent, enc):
        P = self.params
        fvec = P["field_embed"][field_id]
        if self.config.parent_feeding:
            feed = np.concatenate([fvec, parent])
        else:
            feed = fvec
        x = np.concatenate([a_vec, att_prev, feed])
        h, c, lcache = lstm_cell(P["dec_Wx"], P["dec_Wh"], P["dec_b"], x, h_prev, c_prev)
        u = P["att_W"] @ h
        alpha = softmax(enc.states @ u)
        ctx = alpha @ enc.states
        cs = np.concatenate([ctx, h])
        att = np.tanh(P["comb_W"] @ cs)
        return DecoderStep(h, c, att, ctx, alpha, feed, (lcache, u, cs))

    def _step_backward(self, step, enc, datt, dh, dc, grads, dstates):
        P = self.params
        lcache, u, cs = step.cache
        dpre = datt * (1.0 - step.att * step.att)
        grads["comb_W"] += np.outer(dpre, cs)
        dcs = P["comb_W"].T @ dpre
        H2 = enc.states.shape[1]
        dctx = dcs[:H2]
        dh = dh + dcs[H2:]
        dstates += np.outer(step.alpha, dctx)
        dscores = softmax_backward(step.alpha, enc.states @ dctx)
        dstates += np.outer(dscores, u)
        du = enc.states.T @ dscores
        grads["att_W"] += np.outer(du, step.h)
        dh = dh + P["att_W"].T @ du
        dx, dh_prev, dc_prev = lstm_cell_backward(P["dec_Wx"], P["dec_Wh"], lcache, dh, dc, grads, "dec")
        return dx, dh_prev, dc_prev

    # --- output heads ------------------------------------------------------

    def head_for(self, space: ActionSpace) -> Head:
        head = self._heads.get(space)
        if head is not None:
            return head
        if space.constructors:
            actions = [ApplyConstr(c) for c in space.constructors]
            ids = [self.prod_ids[c.name] for c in space.constructors]
            if space.reduce:
                actions.append(REDUCE)
                ids.append(self.reduce_id)
            head = Head("apply", np.array(ids), actions=tuple(actions))
        elif space.columns:
            head = Head("column", np.array([], dtype=int), reduce=space.reduce, columns=space.columns)
        elif space.tokens or space.end_token:
            ids = np.arange(len(self.tok_vocab))
            if not space.end_token:
                ids = ids[ids != self.end_id]
            elif not space.tokens:
                ids = np.array([self.end_id])
            head = Head("token", ids, reduce=space.reduce)
        elif space.reduce:
            head = Head("apply", np.array([self.reduce_id]), actions=(REDUCE,))
        else:
            raise IllegalAction("no legal action at this frontier", rule="empty-space")
        self._heads[space] = head
        return head

    def _head_forward(self, head: Head, s, enc: EncoderStates) -> dict:
        P = self.params
        if head.kind == "apply":
            q = P["app_W"] @ s
            logp = log_softmax(P["prod_embed"][head.ids] @ q)
            return {"q": q, "logp": logp}
        if head.kind == "column":
            if enc.columns is None:
                raise MissingTable("column selection needs table column encodings")
            qc = P["col_W"] @ s
            logits = enc.columns @ qc
            out = {"qc": qc}
            if head.reduce:
                q = P["app_W"] @ s
                out["q"] = q
                logits = np.append(logits, P["prod_embed"][self.reduce_id] @ q)
            out["logp"] = log_softmax(logits)
            return out
        qg = P["gen_W"] @ s
        logits = P["tok_embed"][head.ids] @ qg
        out = {"qg": qg}
        if head.reduce:
            q = P["app_W"] @ s
            out["q"] = q
            logits = np.append(logits, P["prod_embed"][self.reduce_id] @ q)
        out["pv"] = softmax(logits)
        out["gate"] = softmax(P["gate_W"] @ s + P["gate_b"])
        pq = P["copy_W"] @ s
        out["pq"] = pq
        out["ptr"] = softmax(enc.states @ pq)
        return out

    def _target_logprob(self, head: Head, out: dict, target: tuple) -> float:
        if head.kind != "token":
            return float(out["logp"][target[0]])
        gen_pos, copy_pos = target
        p = 0.0
        if gen_pos >= 0:
            p += out["gate"][0] * out["pv"][gen_pos]
        if len(copy_pos):
            p += out["gate"][1] * out["ptr"][copy_pos].sum()
        return float(np.log(p))

    def _reduce_backward(self, dr, out, s, grads):
        P = self.params
        grads["prod_embed"][self.reduce_id] += dr * out["q"]
        dq = dr * P["prod_embed"][self.reduce_id]
        grads["app_W"] += np.outer(dq, s)
        return P["app_W"].T @ dq

    def _head_backward(self, head, out, target, s, enc, grads, dstates, dcolumns):
        """Gradient of -log p(target) wrt the head input ``s``."""
        P = self.params
        if head.kind == "apply":
            dl = np.exp(out["logp"])
            dl[target[0]] -= 1.0
            grads["prod_embed"][head.ids] += np.outer(dl, out["q"])
            dq = P["prod_embed"][head.ids].T @ dl
            grads["app_W"] += np.outer(dq, s)
            return P["app_W"].T @ dq
        if head.kind == "column":
            dl = np.exp(out["logp"])
            dl[target[0]] -= 1.0
            K = head.columns
            dcolumns += np.outer(dl[:K], out["qc"])
            dq = enc.columns.T @ dl[:K]
            grads["col_W"] += np.outer(dq, s)
            ds = P["col_W"].T @ dq
            if head.reduce:
                ds = ds + self._reduce_backward(dl[K], out, s, grads)
            return ds
        gen_pos, copy_pos = target
        gate, pv, ptr = out["gate"], out["pv"], out["ptr"]
        gen = pv[gen_pos] if gen_pos >= 0 else 0.0
        cp = ptr[copy_pos].sum() if len(copy_pos) else 0.0
        total = gate[0] * gen + gate[1] * cp
        dP = -1.0 / total
        dgl = softmax_backward(gate, np.array([gen, cp], dtype=self.dtype) * dP)
        grads["gate_W"] += np.outer(dgl, s)
        grads["gate_b"] += dgl
        ds = P["gate_W"].T @ dgl
        if gen_pos >= 0:
            dpv = np.zeros_like(pv)
            dpv[gen_pos] = dP * gate[0]
            dl = softmax_backward(pv, dpv)
            n = len(head.ids)
            grads["tok_embed"][head.ids] += np.outer(dl[:n], out["qg"])
            dq = P["tok_embed"][head.ids].T @ dl[:n]
            grads["gen_W"] += np.outer(dq, s)
            ds = ds + P["gen_W"].T @ dq
            if head.reduce:
                ds = ds + self._reduce_backward(dl[n], out, s, grads)
        if len(copy_pos):
            dptr = np.zeros_like(ptr)
            dptr[copy_pos] = dP * gate[1]
            dpl = softmax_backward(ptr, dptr)
            dstates += np.outer(dpl, out["pq"])
            dq = enc.states.T @ dpl
            grads["copy_W"] += np.outer(dq, s)
            ds = ds + P["copy_W"].T @ dq
        return ds

    def action_logprobs(self, step: DecoderStep, space: ActionSpace, enc: EncoderStates) -> dict:
        """Log-probability of every legal action (GenToken over vocab + utterance)."""
        if space.columns and enc.columns is None:
            raise MissingTable("SelColumn is legal but no table was encoded")
        head = self.head_for(space)
        out = self._head_forward(head, step.att, enc)
        if head.kind == "apply":
            return dict(zip(head.actions, out["logp"].tolist()))
        if head.kind == "column":
            lp = out["logp"].tolist()
            res = {SelColumn(k): lp[k] for k in range(head.columns)}
            if head.reduce:
                res[REDUCE] = lp[-1]
            return res
        gate, pv, ptr = out["gate"], out["pv"], out["ptr"]
        probs: dict = {}
        itos = self.tok_vocab.itos
        gen = gate[0] * pv
        n = len(head.ids)
        for j, vid in enumerate(head.ids.tolist()):
            probs[itos[vid]] = gen[j]
        if space.tokens:
            for tok, pos in enc.copy_index.items():
                if tok == END_TOKEN:
                    continue
                probs[tok] = probs.get(tok, 0.0) + gate[1] * ptr[pos].sum()
        res = {}
        with np.errstate(divide="ignore"):
            for tok, p in probs.items():
                res[GenToken(tok)] = float(np.log(p))
            if head.reduce:
                res[REDUCE] = float(np.log(gen[n]))
        return res

    # --- teacher forcing -----------------------------------------------------

    def _token_target(self, head, token, tokens_index):
        vid = self.tok_vocab.stoi.get(token)
        copy = tokens_index.get(token, np.array([], dtype=int)) if token != END_TOKEN else np.array([], dtype=int)
        if vid is None and not len(copy):
            vid = self.tok_vocab.unk_id
        gen_pos = -1
        if vid is not None:
            hits = np.nonzero(head.ids == vid)[0]
            if len(hits):
                gen_pos = int(hits[0])
        return (gen_pos, copy)

    def make_plan(self, utterance: Sequence[str], actions: Sequence,
                  table: Optional[TableContext] = None) -> ExamplePlan:
        """Replay ``actions`` to fix the decoder inputs and targets of each step."""
        tokens = tuple(utterance)
        index: dict = {}
        for i, t in enumerate(tokens):
            index.setdefault(t, []).append(i)
        index = {t: np.array(v) for t, v in index.items()}
        hyp = init_hypothesis(self.grammar, table)
        steps = []
        prev = None
        for t, a in enumerate(actions):
            if hyp.is_complete():
                raise IllegalOracle(f"oracle continues after completion at action {t}")
            space = valid_actions(hyp)
            frontier = hyp.frontier
            head = self.head_for(space)
            if isinstance(a, ApplyConstr):
                target = (list(head.actions).index(a),) if a in space else None
            elif isinstance(a, Reduce):
                if head.kind == "apply":
                    target = (list(head.actions).index(a),) if a in space else None
                elif head.kind == "column":
                    target = (head.columns,)
                else:
                    target = (len(head.ids), np.array([], dtype=int))
            elif isinstance(a, SelColumn):
                target = (a.index,)
            else:
                target = self._token_target(head, a.token, index)
            if target is None or a not in space:
                raise IllegalOracle(f"oracle action {t} ({a}) is illegal at {frontier}")
            steps.append(StepPlan(self.action_key(prev), self.field_id(frontier), frontier.parent_step, head, target))
            hyp = apply_action(hyp, a)
            prev = a
        if not hyp.is_complete():
            raise IllegalOracle("oracle ends before the derivation completes")
        return ExamplePlan(tokens, np.array(self.src_vocab.ids(tokens)), table, steps)

    def loss_and_grad(self, plan: ExamplePlan, grad: bool = True, train: bool = False,
                      rng: Optional[np.random.Generator] = None):
        """Sequence NLL (sum over steps) and, optionally, its gradient."""
        P = self.params
        H = self.config.hidden_dim
        enc = self._encode(plan.tokens, plan.src_ids, plan.table)
        h, c, att = self.initial_state(enc)
        pre0 = c
        zero = np.zeros(H, dtype=self.dtype)
        keep = 1.0 - self.config.dropout_rate
        hs, records = [], []
        loss = 0.0
        for sp in plan.steps:
            parent = hs[sp.parent_step] if sp.parent_step >= 0 else zero
            step = self._step(h, c, att, self._action_vec(sp.prev), sp.field_id, parent, enc)
            mask = None
            s = step.att
            if train and self.config.dropout_rate > 0:
                mask = (rng.random(H) < keep).astype(self.dtype) / keep
                s = s * mask
            out = self._head_forward(sp.head, s, enc)
            loss -= self._target_logprob(sp.head, out, sp.target)
            records.append((step, mask, s, out))
            hs.append(step.h)
            h, c, att = step.h, step.c, step.att
        if not grad:
            return loss, None

        grads = self.zeros_like_params()
        dstates = np.zeros_like(enc.states)
        dcolumns = np.zeros_like(enc.columns) if enc.columns is not None else None
        dh_extra = [np.zeros(H, dtype=self.dtype) for _ in plan.steps]
        dh_next = np.zeros(H, dtype=self.dtype)
        dc_next = np.zeros(H, dtype=self.dtype)
        datt_next = np.zeros(H, dtype=self.dtype)
        A = self.config.action_embed_dim
        F = self.config.field_embed_dim
        for t in range(len(plan.steps) - 1, -1, -1):
            sp = plan.steps[t]
            step, mask, s, out = records[t]
            ds = self._head_backward(sp.head, out, sp.target, s, enc, grads, dstates, dcolumns)
            if mask is not None:
                ds = ds * mask
            dx, dh_next, dc_next = self._step_backward(
                step, enc, ds + datt_next, dh_next + dh_extra[t], dc_next, grads, dstates)
            if sp.prev is not None:
                grads[sp.prev[0]][sp.prev[1]] += dx[:A]
            datt_next = dx[A:A + H]
            grads["field_embed"][sp.field_id] += dx[A + H:A + H + F]
            if self.config.parent_feeding and sp.parent_step >= 0:
                dh_extra[sp.parent_step] += dx[A + H + F:]
        # h0 = tanh(pre), c0 = pre; att_0 is a constant zero vector
        h0 = np.tanh(pre0)
        dpre = dc_next + dh_next * (1.0 - h0 * h0)
        grads["init_W"] += np.outer(dpre, enc.summary)
        grads["init_b"] += dpre
        dsummary = P["init_W"].T @ dpre
        self._encode_backward(enc, dstates, dsummary, dcolumns, grads)
        return loss, grads

    def sequence_nll(self, utterance: Sequence[str], actions: Sequence,
                     table: Optional[TableContext] = None) -> float:
        return self.loss_and_grad(self.make_plan(utterance, actions, table), grad=False)[0]
