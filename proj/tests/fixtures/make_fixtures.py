"""Regenerates the CSV fixtures used by the test suite.

The files are committed; rerun this only when the fixtures need to
change.
"""

import random

random.seed(20240817)


def write_housing(path, n=400):
    # Eight numeric columns, binary target from a noisy linear score.
    cols = ["med_inc", "house_age", "ave_rooms", "ave_bedrms", "population",
            "ave_occup", "latitude", "longitude"]
    with open(path, "w") as f:
        f.write(",".join(cols) + ",label\n")
        for _ in range(n):
            x = [random.gauss(0, 1) for _ in cols]
            score = 1.2 * x[0] - 0.8 * x[2] + 0.5 * x[5] + random.gauss(0, 0.8)
            y = 1 if score > 0 else 0
            f.write(",".join(f"{v:.6f}" for v in x) + f",{y}\n")


def write_stroke(path, n=500):
    # Mixed numeric and categorical columns with missing cells.
    genders = ["male", "female", "other"]
    smoke = ["never", "formerly", "smokes", "unknown"]
    work = ["private", "self", "gov", "child"]
    with open(path, "w") as f:
        f.write("gender,age,hypertension,avg_glucose,bmi,work_type,"
                "smoking_status,label\n")
        for i in range(n):
            g = random.choice(genders)
            age = random.uniform(18, 90)
            hyp = 1 if random.random() < 0.2 else 0
            glu = random.uniform(60, 280)
            bmi = random.uniform(16, 45)
            w = random.choice(work)
            s = random.choice(smoke)
            score = (0.04 * age + 0.9 * hyp + 0.008 * glu +
                     (0.7 if s == "smokes" else 0.0) + random.gauss(0, 1.2))
            y = 1 if score > 5.0 else 0
            bmi_cell = "" if i % 23 == 0 else f"{bmi:.2f}"
            glu_cell = "NA" if i % 41 == 0 else f"{glu:.2f}"
            f.write(f"{g},{age:.1f},{hyp},{glu_cell},{bmi_cell},{w},{s},{y}\n")


def write_separable(path, n=240):
    # One feature fully decides the label with a wide margin; a second
    # carries mild noise. Used for the AUC = 1 end-to-end check.
    with open(path, "w") as f:
        f.write("x0,x1,label\n")
        for _ in range(n):
            y = random.randint(0, 1)
            x0 = random.uniform(0.7, 1.0) if y else random.uniform(0.0, 0.3)
            x1 = random.gauss(0, 1)
            f.write(f"{x0:.6f},{x1:.6f},{y}\n")


def write_outlier(path, n=120):
    # Column x1 carries one extreme value; the leakage check pins the
    # split seed so that row lands in the test split.
    with open(path, "w") as f:
        f.write("x0,x1,label\n")
        for i in range(n):
            x0 = random.uniform(0, 1)
            x1 = 1000.0 if i == 7 else random.uniform(0, 1)
            y = 1 if x0 > 0.5 else 0
            f.write(f"{x0:.6f},{x1:.6f},{y}\n")


if __name__ == "__main__":
    write_housing("housing_shaped.csv")
    write_stroke("stroke_shaped.csv")
    write_separable("separable.csv")
    write_outlier("outlier.csv")
