"""Command-line front end.

    sparse-expsum recover  --input samples.csv [--output model.json] [--diagnostics d.json]
    sparse-expsum spectrum --input model.json
    sparse-expsum reduce   --input model.json|samples.csv (--eps E | --K K) [--norm l1|l2] [--table t.csv]
    sparse-expsum eval     --input model.json --truncation M
    sparse-expsum norms    --input model.json
    sparse-expsum verify   --input model.json --K K --truncation m

Exit status is 0 on success, 1 for invalid input and 2 for numerical
failures; errors are reported as a single ``CODE: message`` line on stderr.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .aak import hankel_con_eigen, reduce_to_eps, reduce_to_K
from .core import ExponentialSum, difference, l1_norm_truncated, l2_norm, sample
from .errors import ExpSumError, NumericalError, ValidationError
from .oracle import verify_aak
from .prony import PronyOptions, recover_detailed

L1_TOL = 1e-10


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message, usage=True)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sparse-expsum", description="Sparse approximation of exponential sums.")
    sub = p.add_subparsers(dest="command", metavar="{recover,spectrum,reduce,eval,norms,verify}")
    sub.required = True

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--input", required=True, help="model JSON or samples CSV")
        sp.add_argument("--output", help="output file (default: stdout)")
        return sp

    sp = add("recover", "recover a model from samples (CSV)")
    sp.add_argument("--diagnostics", help="write order/singular-value/residual record here")
    _prony_flags(sp)

    add("spectrum", "singular values of the Hankel operator")

    sp = add("reduce", "reduce a model (or recovered samples) to fewer terms")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--eps", type=float, help="target error")
    g.add_argument("--K", type=int, help="number of terms to keep")
    sp.add_argument("--norm", choices=["l1", "l2"], default="l2")
    sp.add_argument("--fit-window", type=int, metavar="M",
                    help="fit l2 weights on samples 0..M only and report that residual too")
    sp.add_argument("--table", help="write the per-K error table (CSV) here")
    _prony_flags(sp)

    sp = add("eval", "sample a model on k = 0..M")
    sp.add_argument("--truncation", type=int, required=True, metavar="M")

    add("norms", "l2 and truncated l1 norms of a model")

    sp = add("verify", "numerical check of the optimal Hankel perturbation")
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--truncation", type=int, default=400, metavar="m")
    return p


def _prony_flags(sp):
    sp.add_argument("--rank-tol", type=float, default=1e-12)
    sp.add_argument("--max-order", type=int, default=None)


def _prony_options(args) -> PronyOptions:
    return PronyOptions(max_order=args.max_order, rank_tol=args.rank_tol)


def _is_csv(path: str) -> bool:
    if path.lower().endswith(".csv"):
        return True
    if path.lower().endswith(".json"):
        return False
    head = Path(path).read_text()[:64].lstrip()
    return not head.startswith("{")


def _load_model(args) -> ExponentialSum:
    if _is_csv(args.input):
        if not hasattr(args, "rank_tol"):
            raise ValidationError(f"{args.command} expects a model JSON, got samples")
        return recover_detailed(io.load_samples(args.input), _prony_options(args)).sum
    return io.load_sum(args.input)


def _emit(text: str, path: str | None):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _result_dict(res, window=None) -> dict:
    out = {
        "K": res.K,
        "sigma_K": res.sigma_K,
        "roots": [complex(r) for r in res.disc_roots],
        "reduced": io.sum_to_dict(res.reduced),
        "error_l2": res.error_l2,
        "bound_satisfied": res.bound_satisfied,
        "no_reduction": res.no_reduction,
    }
    if res.fit is not None:
        out["fit_method"] = res.fit.method
        out["fit_objective"] = res.fit.objective
    if window is not None and res.fit is not None and res.fit.method == "l2-sampled":
        out["error_l2_window"] = res.fit.objective
    return out


def _error_table(s: ExponentialSum, system, norm: str, window) -> str:
    lines = ["K,sigma_K,error_l2,error_l1_truncated"]
    for K in range(s.order):
        sig = io._float(system.sigmas[K])
        if not system.simplicity_flags[K]:
            lines.append(f"{K},{sig},cluster,cluster")
            continue
        try:
            r = reduce_to_K(s, K, norm=norm, system=system, sample_M=window)
            l1 = l1_norm_truncated(difference(s, r.reduced), L1_TOL)
            lines.append(f"{K},{sig},{io._float(r.error_l2)},{io._float(l1)}")
        except NumericalError as exc:
            lines.append(f"{K},{sig},{exc.code},{exc.code}")
    return "\n".join(lines) + "\n"


def _cmd_recover(args):
    res = recover_detailed(io.load_samples(args.input), _prony_options(args))
    _emit(io.dumps(io.sum_to_dict(res.sum)) + "\n", args.output)
    if args.diagnostics:
        Path(args.diagnostics).write_text(io.dumps(res.diagnostics()) + "\n")


def _cmd_spectrum(args):
    s = _load_model(args)
    sig = hankel_con_eigen(s).sigmas.tolist() if s.order else []
    _emit(io.dumps(sig) + "\n", args.output)


def _cmd_reduce(args):
    s = _load_model(args)
    if args.K is not None and not 0 <= args.K < s.order:
        raise ValidationError(f"--K must satisfy 0 <= K < N = {s.order}")
    if args.fit_window is not None and args.norm != "l2":
        raise ValidationError("--fit-window applies to the l2 fit only")
    system = hankel_con_eigen(s) if s.order else None
    if args.K is not None:
        res = reduce_to_K(s, args.K, norm=args.norm, system=system, sample_M=args.fit_window)
    else:
        res = reduce_to_eps(s, args.eps, norm=args.norm, system=system, sample_M=args.fit_window)
    _emit(io.dumps(_result_dict(res, args.fit_window)) + "\n", args.output)
    if args.table and system is not None:
        Path(args.table).write_text(_error_table(s, system, args.norm, args.fit_window))


def _cmd_eval(args):
    if args.truncation < 0:
        raise ValidationError("--truncation must be nonnegative")
    _emit(io.samples_to_csv(sample(io.load_sum(args.input), args.truncation)), args.output)


def _cmd_norms(args):
    s = _load_model(args)
    out = {"l2": l2_norm(s), "l1_truncated": l1_norm_truncated(s, L1_TOL), "l1_tol": L1_TOL}
    _emit(io.dumps(out) + "\n", args.output)


def _cmd_verify(args):
    s = _load_model(args)
    _emit(io.dumps(verify_aak(s, args.K, args.truncation).as_dict()) + "\n", args.output)


COMMANDS = {
    "recover": _cmd_recover,
    "spectrum": _cmd_spectrum,
    "reduce": _cmd_reduce,
    "eval": _cmd_eval,
    "norms": _cmd_norms,
    "verify": _cmd_verify,
}


def _oneline(msg) -> str:
    return " ".join(str(msg).split())


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        COMMANDS[args.command](args)
    except ValidationError as exc:
        code = "E_USAGE" if exc.details.get("usage") else exc.code
        print(f"{code}: {_oneline(exc)}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"{exc.code}: {_oneline(exc)}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"E_IO: {_oneline(exc)}", file=sys.stderr)
        return 1
    except ExpSumError as exc:
        print(f"{exc.code}: {_oneline(exc)}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
