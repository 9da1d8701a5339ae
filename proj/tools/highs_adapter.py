#!/usr/bin/env python3
"""Solve an MPS file with HiGHS and write an iabplan solution file.

    highs_adapter.py MODEL.mps OUT.sol [--time-limit SECONDS]

Output lines are `name value`, plus `=status=`, `=obj=` and `=gap=`.
"""
import argparse
import sys

import highspy


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("mps")
    ap.add_argument("sol")
    ap.add_argument("--time-limit", type=float, default=None)
    args = ap.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    if args.time_limit:
        h.setOptionValue("time_limit", args.time_limit)
    if h.readModel(args.mps) != highspy.HighsStatus.kOk:
        print("cannot read " + args.mps, file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    info = h.getInfo()
    ms = highspy.HighsModelStatus
    with open(args.sol, "w") as out:
        if status == ms.kInfeasible:
            out.write("=status= infeasible\n")
            return 0
        if info.primal_solution_status == 0:
            out.write("=status= timeout\n")
            return 0
        if status == ms.kOptimal:
            out.write("=status= optimal\n")
        else:
            out.write("=status= feasible\n")
            out.write("=gap= %.17g\n" % info.mip_gap)
        out.write("=obj= %.17g\n" % info.objective_function_value)
        lp = h.getLp()
        values = h.getSolution().col_value
        for name, v in zip(lp.col_names_, values):
            if v != 0.0:
                out.write("%s %.17g\n" % (name, v))
    return 0


if __name__ == "__main__":
    sys.exit(main())
