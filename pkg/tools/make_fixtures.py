"""Regenerate the bundled data files in src/bessopt/data/.

The network table is the standard 33-bus radial feeder (12.66 kV).  The
24-slot profiles are synthetic, shaped to have a night price valley, a midday
PV bell, and an evening EV peak; they are stand-ins, not measured data.
"""

from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "src" / "bessopt" / "data"

# from,to,r_ohm,x_ohm and the receiving bus load p_kw,q_kvar
LINES = [
    (1, 2, 0.0922, 0.0470, 100, 60),
    (2, 3, 0.4930, 0.2511, 90, 40),
    (3, 4, 0.3660, 0.1864, 120, 80),
    (4, 5, 0.3811, 0.1941, 60, 30),
    (5, 6, 0.8190, 0.7070, 60, 20),
    (6, 7, 0.1872, 0.6188, 200, 100),
    (7, 8, 0.7114, 0.2351, 200, 100),
    (8, 9, 1.0300, 0.7400, 60, 20),
    (9, 10, 1.0440, 0.7400, 60, 20),
    (10, 11, 0.1966, 0.0650, 45, 30),
    (11, 12, 0.3744, 0.1238, 60, 35),
    (12, 13, 1.4680, 1.1550, 60, 35),
    (13, 14, 0.5416, 0.7129, 120, 80),
    (14, 15, 0.5910, 0.5260, 60, 10),
    (15, 16, 0.7463, 0.5450, 60, 20),
    (16, 17, 1.2890, 1.7210, 60, 20),
    (17, 18, 0.7320, 0.5740, 90, 40),
    (2, 19, 0.1640, 0.1565, 90, 40),
    (19, 20, 1.5042, 1.3554, 90, 40),
    (20, 21, 0.4095, 0.4784, 90, 40),
    (21, 22, 0.7089, 0.9373, 90, 40),
    (3, 23, 0.4512, 0.3083, 90, 50),
    (23, 24, 0.8980, 0.7091, 420, 200),
    (24, 25, 0.8960, 0.7011, 420, 200),
    (6, 26, 0.2030, 0.1034, 60, 25),
    (26, 27, 0.2842, 0.1447, 60, 25),
    (27, 28, 1.0590, 0.9337, 60, 20),
    (28, 29, 0.8042, 0.7006, 120, 70),
    (29, 30, 0.5075, 0.2585, 200, 600),
    (30, 31, 0.9744, 0.9630, 150, 70),
    (31, 32, 0.3105, 0.3619, 210, 100),
    (32, 33, 0.3410, 0.5302, 60, 40),
]

# synthetic customer-class map; exponents per class live in the bus rows
CLASS = {}
for b in [1, 2, 19, 20, 21, 22]:
    CLASS[b] = "commercial"
for b in range(6, 19):
    CLASS[b] = "residential"
for b in [3, 4, 5, 23, 24, 25] + list(range(26, 34)):
    CLASS[b] = "industrial"

KAPPA = {"residential": 1.2, "commercial": 0.99, "industrial": 0.18}


def write_network():
    rows = ["# bessopt network v1 -- standard 33-bus feeder, synthetic classes",
            "[meta]", "base_kv,12.66", "base_mva,10.0", "[buses]",
            "id,p_kw,q_kvar,class,kind,v_min,v_max,s_max_kva,kappa"]
    loads = {1: (0, 0)}
    for _, to, _, _, p, q in LINES:
        loads[to] = (p, q)
    for b in sorted(loads):
        cls = CLASS[b]
        kind = "slack" if b == 1 else "load"
        smax = 10000.0 if b == 1 else 5000.0
        rows.append(f"{b},{loads[b][0]},{loads[b][1]},{cls},{kind},"
                    f"0.90,1.05,{smax},{KAPPA[cls]}")
    rows.append("[lines]")
    rows.append("from,to,r_ohm,x_ohm")
    for f, t, r, x, _, _ in LINES:
        rows.append(f"{f},{t},{r},{x}")
    (DATA / "ieee33_network.csv").write_text("\n".join(rows) + "\n")


PRICE = [0.08, 0.08, 0.08, 0.08, 0.08, 0.09,
         0.10, 0.12, 0.13, 0.13, 0.12, 0.12,
         0.11, 0.11, 0.12, 0.13, 0.15, 0.18,
         0.20, 0.20, 0.19, 0.16, 0.12, 0.09]
PV = [0, 0, 0, 0, 0, 0,
      0.05, 0.15, 0.30, 0.50, 0.70, 0.85,
      0.90, 0.88, 0.75, 0.60, 0.40, 0.20,
      0.08, 0, 0, 0, 0, 0]
EV1 = [20, 15, 10, 10, 10, 15,
       30, 45, 40, 35, 30, 30,
       35, 35, 40, 50, 80, 140,
       200, 220, 200, 150, 90, 40]
EV2 = [30, 20, 15, 10, 10, 20,
       50, 80, 70, 60, 50, 50,
       55, 55, 65, 90, 140, 240,
       330, 360, 330, 240, 140, 60]
M_RES = [0.55, 0.52, 0.50, 0.50, 0.52, 0.58,
         0.68, 0.75, 0.70, 0.65, 0.62, 0.62,
         0.63, 0.62, 0.63, 0.68, 0.80, 0.92,
         1.00, 1.00, 0.95, 0.85, 0.72, 0.60]
M_COM = [0.50, 0.48, 0.48, 0.48, 0.50, 0.55,
         0.70, 0.85, 0.95, 0.97, 0.97, 0.95,
         0.95, 0.96, 0.97, 0.95, 0.90, 0.82,
         0.75, 0.70, 0.65, 0.60, 0.55, 0.52]
M_IND = [0.82, 0.82, 0.82, 0.82, 0.84, 0.86,
         0.90, 0.92, 0.92, 0.92, 0.92, 0.90,
         0.90, 0.92, 0.92, 0.92, 0.90, 0.88,
         0.88, 0.86, 0.84, 0.82, 0.82, 0.82]


def write_profiles():
    rows = ["slot,price,pv_fraction,ev_l1_kw,ev_l2_kw,"
            "mult_residential,mult_commercial,mult_industrial"]
    for t in range(24):
        rows.append(f"{t},{PRICE[t]},{PV[t]},{EV1[t]},{EV2[t]},"
                    f"{M_RES[t]},{M_COM[t]},{M_IND[t]}")
    (DATA / "profiles_24h.csv").write_text("\n".join(rows) + "\n")


SCENARIO = """\
# Bundled 33-bus scenario (synthetic profiles).
network = "ieee33_network.csv"
profiles = "profiles_24h.csv"
horizon = 24
dt = 1.0
lambda1 = 1.0
lambda2 = 1.0
n_pareto_points = 8
output_dir = "out"

[[pv]]
bus = 9
capacity_kw = 500.0
[[pv]]
bus = 13
capacity_kw = 500.0
[[pv]]
bus = 25
capacity_kw = 500.0
[[pv]]
bus = 30
capacity_kw = 500.0

[[ev]]
bus = 8
level = 1
[[ev]]
bus = 14
level = 1
[[ev]]
bus = 18
level = 1
[[ev]]
bus = 2
level = 2
[[ev]]
bus = 19
level = 2
[[ev]]
bus = 27
level = 2

[[bess]]
bus = 18
capacity_kwh = 1000.0
p_max_kw = 250.0
invest_cost = 3000.0
[[bess]]
bus = 33
capacity_kwh = 1000.0
p_max_kw = 250.0
invest_cost = 3000.0

[solver]
population = 24
max_evals = 4000
seed = 1
"""


def write_scenario():
    (DATA / "scenario_33bus.toml").write_text(SCENARIO)


if __name__ == "__main__":
    DATA.mkdir(parents=True, exist_ok=True)
    write_network()
    write_profiles()
    write_scenario()
    print("fixtures written to", DATA)
