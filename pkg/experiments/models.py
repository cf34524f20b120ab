from django.db import models


class ExperimentRun(models.Model):
    """A recorded ``corrstoch`` invocation and the report it produced."""

    MODE_CHOICES = [
        ('demo', 'Worked examples'),
        ('check', 'Property suites'),
        ('secondlaw', 'Second-law check'),
        ('tomography', 'Finite-sample tomography'),
        ('random-instance', 'Random instance'),
    ]

    mode = models.CharField(max_length=20, choices=MODE_CHOICES)
    # 64-bit unsigned seeds do not fit a signed BigIntegerField
    seed = models.CharField(max_length=20)
    config = models.JSONField(help_text='Validated run configuration')
    report = models.JSONField(help_text='Report document as written to stdout')
    exit_code = models.PositiveSmallIntegerField(default=0)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']
        verbose_name = 'experiment run'
        verbose_name_plural = 'experiment runs'

    def __str__(self):
        return f"{self.mode} seed={self.seed} exit={self.exit_code}"

    @property
    def passed(self):
        return self.exit_code == 0
