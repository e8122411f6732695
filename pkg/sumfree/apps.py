from django.apps import AppConfig


class SumfreeConfig(AppConfig):
    name = "sumfree"
    verbose_name = "Sum-free sets in random subsets of abelian groups"
