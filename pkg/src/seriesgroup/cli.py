"""Command-line front end: ``seriesgroup VERB [options]``.

Chains, series, fields, certificates and reports are exchanged as JSON.
Exit status: 0 success, 1 an Inconclusive certificate under
``--require-nontrivial`` (or no BP witness), 2 usage, parse, unknown
generator or order mismatch, 3 term-count blowup.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from . import bpcheck, embed
from .errors import BlowupError, SeriesGroupError
from .field import FieldElem, as_rational, get_max_terms, max_terms, set_max_terms
from .liealg import VectorField, exp, flow, log
from .series import Series
from .words import Word

EXIT_OK = 0
EXIT_INCONCLUSIVE = 1
EXIT_USAGE = 2
EXIT_BLOWUP = 3


class CliError(Exception):
    """Usage problem detected after argument parsing."""


# -- I/O helpers ------------------------------------------------------------

def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_chain(path: str | None) -> embed.Chain:
    if not path:
        raise CliError("--chain is required")
    try:
        return embed.Chain.loads(_read_text(path))
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CliError(f"cannot read chain {path}: {exc}") from exc


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, data) -> None:
    _emit(args, json.dumps(data, indent=2) + "\n")


def _parse_partner(text: str) -> tuple[str, Word] | str:
    if "=" in text:
        name, word = text.split("=", 1)
        return name.strip(), Word.parse(word)
    return text.strip()


def _chain_at(chain: embed.Chain, order: int | None) -> embed.Chain:
    if order is None or order == chain.order:
        return chain
    return chain.truncated(order)


def _series_input(args) -> Series:
    """A series from ``--series FILE``, ``--coeffs c1,c2,...`` or ``--chain`` with ``--word``."""
    if args.series:
        try:
            return Series.from_json(json.loads(_read_text(args.series)))
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CliError(f"cannot read series {args.series}: {exc}") from exc
    if args.coeffs:
        return Series([FieldElem.parse(c) for c in args.coeffs.split(",")])
    if args.chain and args.word:
        chain = _chain_at(_load_chain(args.chain), args.order)
        return embed.eval_word(chain, args.word[0])
    raise CliError("give --series, --coeffs, or --chain with --word")


def _order_arg(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("order must be at least 1")
    return n


# -- verbs ------------------------------------------------------------------

def cmd_new_chain(args) -> int:
    order = args.order or 8
    field = VectorField.parse(args.base, order)
    chain = embed.one_param_base(order, field, args.name or "X")
    _emit(args, chain.dumps())
    return EXIT_OK


def cmd_step_free_product(args) -> int:
    chain = _load_chain(args.chain)
    partners = [_parse_partner(p) for p in args.partner] or None
    _emit(args, embed.free_product_step(chain, partners).dumps())
    return EXIT_OK


def cmd_step_amalgam(args) -> int:
    if not args.u:
        raise CliError("--u is required")
    chain = _load_chain(args.chain)
    partners = [_parse_partner(p) for p in args.partner] or None
    _emit(args, embed.amalgam_step(chain, partners, args.u).dumps())
    return EXIT_OK


def cmd_step_ext(args) -> int:
    if not args.u or not args.name:
        raise CliError("--u and --name are required")
    chain = _load_chain(args.chain)
    _emit(args, embed.centralizer_extension_step(chain, args.u, args.name).dumps())
    return EXIT_OK


def cmd_surface(args) -> int:
    g = args.genus
    if g < 2 or g % 2:
        raise CliError("only even genus >= 2 is supported")
    _emit(args, embed.surface_group(g // 2, args.order or 16).dumps())
    return EXIT_OK


def cmd_eval(args) -> int:
    chain = _chain_at(_load_chain(args.chain), args.order)
    if not args.word:
        raise CliError("--word is required")
    values = [embed.eval_word(chain, w) for w in args.word]
    if args.text:
        _emit(args, "".join(f"{Word.parse(w).reduced()} = {v}\n" for w, v in zip(args.word, values)))
    else:
        out = [{"word": str(Word.parse(w).reduced()), "series": v.to_json()} for w, v in zip(args.word, values)]
        _emit_json(args, out[0] if len(out) == 1 else out)
    return EXIT_OK


def _certify_batch(chain_json: str, words: Sequence[str], n_max: int | None, mode: str,
                   seed: int, max_terms: int | None) -> list[dict]:
    if max_terms:
        set_max_terms(max_terms)
    engine = embed.CertificateEngine(embed.Chain.loads(chain_json), n_max, mode, seed)
    return [engine.certify(w).to_json() for w in words]


def cmd_certify(args) -> int:
    chain = _chain_at(_load_chain(args.chain), args.order)
    if not args.word:
        raise CliError("--word is required")
    words = list(args.word)
    for w in words:
        for g in Word.parse(w).generators():
            chain.generator(g)
    jobs = max(1, args.jobs or 1)
    if jobs == 1 or len(words) == 1:
        certs = _certify_batch(chain.dumps(), words, args.order_max, args.mode, args.seed, None)
    else:
        # contiguous chunks keep output order deterministic
        size = -(-len(words) // jobs)
        chunks = [words[i:i + size] for i in range(0, len(words), size)]
        text = chain.dumps()
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_certify_batch, text, c, args.order_max, args.mode, args.seed,
                                   args.max_terms) for c in chunks]
            certs = [c for f in futures for c in f.result()]
    if args.text:
        lines = []
        for c in certs:
            line = f"{c['word']}: {c['verdict']} (order {c['order_used']}"
            if c["witness_index"] is not None:
                line += f", coefficient {c['witness_index']}"
            line += ")"
            if c.get("note"):
                line += f" [{c['note']}]"
            lines.append(line + "\n")
        _emit(args, "".join(lines))
    else:
        _emit_json(args, certs[0] if len(certs) == 1 else certs)
    if args.require_nontrivial and any(c["verdict"] != embed.NONTRIVIAL for c in certs):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _bp_chain(args, words: Sequence[Word]) -> embed.Chain:
    chain = _load_chain(args.chain)
    for w in words:
        for g in w.generators():
            chain.generator(g)
    order = args.order
    if order is None:
        order = bpcheck.default_order(args.n_max + args.window, [len(w) for w in words])
    return _chain_at(chain, order)


def _bp_report(args, report: bpcheck.TupleReport) -> int:
    if args.table:
        _emit(args, report.table())
    else:
        _emit_json(args, report.to_json())
    if args.require_nontrivial and not report.found:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_bp_independence(args) -> int:
    if not args.word:
        raise CliError("give the tuple entries with repeated --word")
    words = [Word.parse(w) for w in args.word]
    chain = _bp_chain(args, words)
    u = [embed.eval_word(chain, w) for w in words]
    return _bp_report(args, bpcheck.independence_search(u, args.n_max, args.window))


def cmd_bp_separation(args) -> int:
    if not args.word or not args.g:
        raise CliError("give the tuple with repeated --word and the interleaving words with repeated --g")
    words = [Word.parse(w) for w in args.word]
    gwords = [Word.parse(w) for w in args.g]
    chain = _bp_chain(args, words + gwords)
    u = [embed.eval_word(chain, w) for w in words]
    g = [embed.eval_word(chain, w) for w in gwords]
    return _bp_report(args, bpcheck.separation_check(u, g, args.n_max, args.window))


def cmd_exp(args) -> int:
    if not args.field:
        raise CliError("--field is required")
    h = exp(VectorField.parse(args.field, args.order or 8))
    _emit(args, f"{h}\n" if args.text else json.dumps(h.to_json(), indent=2) + "\n")
    return EXIT_OK


def cmd_log(args) -> int:
    a = log(_series_input(args))
    _emit(args, f"{a}\n" if args.text else json.dumps(a.to_json(), indent=2) + "\n")
    return EXIT_OK


def cmd_flow(args) -> int:
    if args.alpha is None:
        raise CliError("--alpha is required")
    try:
        alpha = FieldElem.constant(as_rational(args.alpha))
    except (ValueError, TypeError):
        alpha = FieldElem.parse(args.alpha)
    h = flow(_series_input(args), alpha)
    _emit(args, f"{h}\n" if args.text else json.dumps(h.to_json(), indent=2) + "\n")
    return EXIT_OK


def cmd_show(args) -> int:
    _emit(args, _load_chain(args.chain).show())
    return EXIT_OK


VERBS = {
    "new-chain": (cmd_new_chain, "start a chain from a one-parameter base exp(field)"),
    "step-free-product": (cmd_step_free_product, "adjoin a conjugated free copy of partner elements"),
    "step-amalgam": (cmd_step_amalgam, "amalgamate a copy of partner elements over the centralizer of --u"),
    "step-ext": (cmd_step_ext, "extend the centralizer of --u by a new generator"),
    "surface": (cmd_surface, "build the surface group of even --genus"),
    "eval": (cmd_eval, "evaluate words to series"),
    "certify": (cmd_certify, "nontriviality certificates for words"),
    "bp-independence": (cmd_bp_independence, "window search for big-powers independence"),
    "bp-separation": (cmd_bp_separation, "window search for the separation condition"),
    "exp": (cmd_exp, "exponential of a vector field"),
    "log": (cmd_log, "logarithm of a series"),
    "flow": (cmd_flow, "fractional power exp(alpha log h)"),
    "show": (cmd_show, "human-readable chain summary"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--chain", help="chain JSON file ('-' for stdin)")
    common.add_argument("--order", type=_order_arg, help="truncation order N")
    common.add_argument("--order-max", type=_order_arg, help="escalation cap for certificates (default: chain order)")
    common.add_argument("--mode", choices=("symbolic", "sampled"), default="symbolic")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-terms", type=int, help="term-count guard per polynomial")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--require-nontrivial", action="store_true",
                        help="exit 1 unless every certificate is Nontrivial")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for certificate batches")
    common.add_argument("--text", action="store_true", help="plain text instead of JSON")

    parser = argparse.ArgumentParser(
        prog="seriesgroup",
        description="Exact computations in the composition group of formal power series.",
        epilog="exit status: 0 ok, 1 inconclusive under --require-nontrivial, 2 usage or input error, 3 blowup",
    )
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")
    p = {}
    for verb, (_, help_text) in VERBS.items():
        p[verb] = sub.add_parser(verb, parents=[common], help=help_text)

    p["new-chain"].add_argument("--base", default="e1", help="vector field, e.g. 'e1 + 2*e2'")
    p["new-chain"].add_argument("--name", help="generator name (default X)")
    for verb in ("step-free-product", "step-amalgam"):
        p[verb].add_argument("--partner", action="append", default=[],
                             help="NEW=WORD, or a bare generator name (copy gets a prime)")
    for verb in ("step-amalgam", "step-ext"):
        p[verb].add_argument("--u", help="word whose centralizer is used")
    p["step-ext"].add_argument("--name", help="name of the adjoined generator")
    p["surface"].add_argument("--genus", type=int, required=True)
    for verb in ("eval", "certify", "bp-independence", "bp-separation", "log", "flow"):
        p[verb].add_argument("--word", action="append", help="word, e.g. \"[A,B] A^-2\" (repeatable)")
    for verb in ("bp-independence", "bp-separation"):
        p[verb].add_argument("--n-max", type=int, default=3)
        p[verb].add_argument("--window", "-B", type=int, default=9, help="window width B")
        p[verb].add_argument("--table", action="store_true", help="render a text table")
    p["bp-separation"].add_argument("--g", action="append", help="interleaving word (repeatable)")
    p["exp"].add_argument("--field", help="vector field, e.g. 'e1 + 1/2*e3'")
    for verb in ("log", "flow"):
        p[verb].add_argument("--series", help="series JSON file ('-' for stdin)")
        p[verb].add_argument("--coeffs", help="comma-separated coefficients c1,...,cN")
    p["flow"].add_argument("--alpha", help="rational or polynomial exponent")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = VERBS[args.verb][0]
    if args.max_terms is not None and args.max_terms < 1:
        parser.error("--max-terms must be positive")
    try:
        with max_terms(args.max_terms or get_max_terms()):
            return handler(args)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except BlowupError as exc:
        print(f"seriesgroup: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except (CliError, SeriesGroupError, ValueError) as exc:
        print(f"seriesgroup: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
