# Generated by Django 4.2.16 on 2026-10-18 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('mode', models.CharField(choices=[('demo', 'Worked examples'), ('check', 'Property suites'), ('secondlaw', 'Second-law check'), ('tomography', 'Finite-sample tomography'), ('random-instance', 'Random instance')], max_length=20)),
                ('seed', models.CharField(max_length=20)),
                ('config', models.JSONField(help_text='Validated run configuration')),
                ('report', models.JSONField(help_text='Report document as written to stdout')),
                ('exit_code', models.PositiveSmallIntegerField(default=0)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'experiment run',
                'verbose_name_plural': 'experiment runs',
                'ordering': ['-created_at'],
            },
        ),
    ]
