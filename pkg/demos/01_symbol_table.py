"""Which symbols does the dynamic cubic model need, and when does the list stop being finite?"""

from regstruct.cli import data_file
from regstruct.structgen import critical_noise_degree, check_subcriticality, generate_symbols, load_spec
from regstruct.symbols import format_degree

spec = load_spec(data_file("phi4_d3.json"))
table = generate_symbols(spec)
print(f"{spec.name}: {len(table)} symbols below {format_degree(table.gamma)}")
print("negative sector (the trees a renormalisation character may touch):")
for t in table.negative_sector:
    print(f"  {format_degree(table.degree(t)):>10}  {t}")

# White noise gets rougher with the dimension; the cubic rule survives up to d = 3.
for d in (2, 3, 4):
    s = load_spec(data_file(f"phi4_d{d}.json"))
    ok, margin = check_subcriticality(s)
    print(f"d = {d}: noise degree {format_degree(s.noises[0][1])}, subcritical = {ok}, margin {format_degree(margin)}")
print("critical noise degree:", format_degree(critical_noise_degree(spec)))
